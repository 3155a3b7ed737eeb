#include <doctest.h>

#include <filesystem>
#include <set>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "adolf/config.hpp"
#include "adolf/error.hpp"
#include "adolf/experiment.hpp"

using namespace adolf;
namespace fs = std::filesystem;

namespace {

const char* kMinimal = R"({
  "problem": {"type": "ridge", "agents": 4, "samples": 5, "dimension": 3},
  "algorithm": {"name": "adolf"}
})";

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("adolf_unit_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int count_lines(const std::string& s) {
  int n = 0;
  for (char ch : s) n += ch == '\n';
  return n;
}

std::string config_error_text(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Config);
    return e.what();
  }
  return "";
}

ExperimentConfig tiny(const std::string& algorithm, const std::string& mode = "",
                      const std::string& stop = R"("max_iter": 10)") {
  std::string text = R"({"seed": 3,
    "problem": {"type": "ridge", "agents": 5, "samples": 6, "dimension": 3},
    "graph": {"type": "ring"},
    "algorithm": {"name": ")" + algorithm + "\"";
  if (!mode.empty()) text += R"(, "mode": ")" + mode + "\"";
  text += R"(},
    "stop": {)" + stop + "}}";
  return parse_config_text(text);
}

}  // namespace

TEST_CASE("minimal config fills defaults") {
  const ExperimentConfig c = parse_config_text(kMinimal);
  CHECK(c.c == 0.4);
  CHECK(c.graph.kind == GraphKind::Line);
  CHECK(c.graph.agents == 4);
  CHECK(c.algorithm.stepsize == StepsizeParams::convex_defaults());
  CHECK(c.algorithm.stepsize.c1 == 0.99);
  CHECK(c.output.name == "adolf");
  CHECK(c.problem.seed == c.seed + kDataSeedOffset);
  CHECK(c.init.seed == c.seed + kInitSeedOffset);

  const ExperimentConfig sc = parse_config_text(R"({
    "problem": {"agents": 4}, "algorithm": {"name": "adolf", "mode": "strongly_convex"}})");
  CHECK(sc.algorithm.stepsize.c1 == 0.5);
  CHECK(sc.algorithm.stepsize.sigma == SigmaSchedule{InverseAlphaSqSigma{0.2}});

  const ExperimentConfig local = parse_config_text(R"({
    "problem": {"agents": 4}, "algorithm": {"name": "adolf_local"}})");
  CHECK(local.algorithm.stepsize.eta == 0.9);
}

TEST_CASE("config errors name the offending key") {
  CHECK(config_error_text(R"({"problem": {"agents": 4}, "gossip": {"c": 0.6},
    "algorithm": {"name": "adolf"}})")
            .find("c must lie in (0, 1/2)") != std::string::npos);
  CHECK(config_error_text(R"({"problem": {"agents": 4, "colour": 1},
    "algorithm": {"name": "adolf"}})")
            .find("problem.colour") != std::string::npos);
  CHECK(config_error_text(R"({"problem": {"agents": 4}, "algorithm": {"name": "dgd"}})")
            .find("algorithm.name") != std::string::npos);
  CHECK(config_error_text(R"({"problem": {"agents": 4}, "algorithm": {"name": "extra"}})")
            .find("stop.metric") != std::string::npos);
  CHECK(config_error_text(R"({"problem": {"agents": 4}, "graph": {"type": "erdos_renyi"},
    "algorithm": {"name": "adolf"}})")
            .find("graph.p") != std::string::npos);
  CHECK(config_error_text(R"({"problem": {"agents": 4}, "graph": {"agents": 5},
    "algorithm": {"name": "adolf"}})")
            .find("graph.agents") != std::string::npos);
  CHECK_FALSE(config_error_text("{not json").empty());
  CHECK_THROWS_AS(parse_config("/nonexistent/config.json"), Error);
}

TEST_CASE("config round trips through its JSON echo") {
  const std::vector<std::string> texts = {
      kMinimal,
      R"({"seed": 9, "problem": {"type": "logistic_synthetic", "agents": 6, "noise": 0.2},
          "graph": {"type": "erdos_renyi", "p": 0.5}, "gossip": {"c": 0.3},
          "algorithm": {"name": "adolf_local", "mode": "strongly_convex", "eta": 0.8},
          "init": {"x0": "zeros"}, "stop": {"max_iter": 50, "metric": "distance_sq", "threshold": 1e-9},
          "diagnostics": {"every": 5, "merit": false}, "output": {"dir": "out", "name": "x"}})",
      R"({"problem": {"agents": 4}, "algorithm": {"name": "extra", "grid": {"lo": 1e-3, "hi": 1, "points": 4}},
          "stop": {"metric": "objective_gap", "threshold": 1e-6}})",
      R"({"problem": {"agents": 4}, "algorithm": {"name": "adolf", "mode": "fixed",
          "fixed": {"alpha": 0.02, "sigma": 2, "gamma": 0.9}}})",
      R"({"problem": {"agents": 4}, "algorithm": {"name": "adolf", "c1": 0.9, "c2": 0.8,
          "growth": {"kind": "ratio_power", "beta1": 5, "beta2": 2}, "sigma": {"kind": "constant", "value": 3}}})",
      R"({"problem": {"type": "mnist", "agents": 20, "images": "i.idx", "labels": "l.idx", "digits": [3, 8]},
          "algorithm": {"name": "condat_vu"}})",
  };
  for (const std::string& t : texts) {
    const ExperimentConfig c = parse_config_text(t);
    CHECK(parse_config_text(emit_config(c)) == c);
  }
}

TEST_CASE("run_experiment writes one row per iteration and a manifest") {
  const fs::path dir = scratch("run");
  const ExperimentConfig c = tiny("adolf");
  const RunManifest m = run_experiment(c, dir);
  const std::string csv = slurp(dir / "adolf.csv");
  CHECK(count_lines(csv) == 12);  // header + k = 0..10
  CHECK(csv.rfind("k,comm_vector,comm_scalar,objective_gap,distance_sq,consensus_err,"
                  "merit_ergodic,lyapunov,alpha_min,alpha_max,gamma,L_k\n",
                  0) == 0);
  REQUIRE(m.entries.size() == 1);
  CHECK(m.entries[0].status == "budget");
  CHECK(fs::path(m.entries[0].path).filename() == "adolf.csv");
  const auto manifest = nlohmann::json::parse(slurp(dir / "adolf.manifest.json"));
  CHECK(manifest["runs"].size() == 1);
  CHECK(manifest.contains("version"));

  const fs::path again = scratch("run_again");
  run_experiment(c, again);
  CHECK(slurp(again / "adolf.csv") == csv);
}

TEST_CASE("run_experiment with an EXTRA grid writes the sweep") {
  const fs::path dir = scratch("grid");
  ExperimentConfig c =
      tiny("extra", "", R"("max_iter": 300, "metric": "distance_sq", "threshold": 1e-6)");
  c.algorithm.extra.grid = {1e-3, 1e-2, 1e-1, 1.0, 10.0};
  const RunManifest m = run_experiment(c, dir);
  CHECK(m.entries.size() == 2);
  CHECK(count_lines(slurp(dir / "extra_grid.csv")) == 6);
}

TEST_CASE("compare tables") {
  SUBCASE("a row that misses the threshold reads budget") {
    ExperimentConfig fast = tiny("adolf", "strongly_convex");
    ExperimentConfig slow = tiny("adolf_local");
    for (ExperimentConfig* c : {&fast, &slow}) {
      c->stop.metric = Metric::DistanceSq;
      c->stop.threshold = 1e-4;
    }
    fast.stop.max_iter = 5000;
    slow.stop.max_iter = 3;
    const Comparison cmp = compare({fast, slow});
    REQUIRE(cmp.rows.size() == 2);
    CHECK(cmp.rows[0].comm_vector.has_value());
    CHECK_FALSE(cmp.rows[1].comm_vector.has_value());
    std::ostringstream summary;
    write_summary_csv(summary, cmp);
    CHECK(summary.str().find("budget,budget,budget") != std::string::npos);
    CHECK(format_summary(cmp).find("budget") != std::string::npos);
    std::ostringstream dat;
    write_gnuplot(dat, cmp);
    CHECK(dat.str().find("\n\n") != std::string::npos);
  }
  SUBCASE("a single config gives one row") {
    ExperimentConfig c = tiny("condat_vu");
    c.stop.metric = Metric::DistanceSq;
    c.stop.threshold = 1e-3;
    CHECK(compare({c}).rows.size() == 1);
  }
  SUBCASE("configs on different instances are rejected") {
    ExperimentConfig a = tiny("adolf");
    ExperimentConfig b = tiny("adolf_local");
    b.problem.seed += 1;
    try {
      compare({a, b});
      FAIL("expected ComparisonInvalid");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::ComparisonInvalid);
    }
    ExperimentConfig dup = tiny("adolf");
    CHECK_THROWS_AS(compare({a, dup}), Error);
  }
  SUBCASE("compare_experiments writes every table") {
    const fs::path dir = scratch("compare");
    ExperimentConfig a = tiny("adolf");
    ExperimentConfig b = tiny("condat_vu");
    compare_experiments({a, b}, dir, "cmp");
    for (const char* f : {"adolf.csv", "condat_vu.csv", "cmp_long.csv", "cmp_summary.csv", "cmp.dat",
                          "cmp.manifest.json"}) {
      CHECK(fs::exists(dir / f));
    }
    const auto manifest = nlohmann::json::parse(slurp(dir / "cmp.manifest.json"));
    std::set<std::string> paths;
    for (const auto& e : manifest["runs"]) paths.insert(e["path"].get<std::string>());
    CHECK(paths.size() == manifest["runs"].size());
  }
}

TEST_CASE("figure presets") {
  PresetOptions synthetic;
  synthetic.synthetic_logistic = true;
  for (const std::string& name : preset_names()) {
    const auto configs = figure_preset(name, synthetic);
    REQUIRE(configs.size() == 3);
    for (const ExperimentConfig& c : configs) {
      CHECK(c.problem.agents == 20);
      CHECK_NOTHROW(validate(c));
    }
  }
  const auto fig2 = figure_preset("fig2_er09", synthetic);
  CHECK(fig2[0].problem.kind == ProblemKind::Ridge);
  CHECK(fig2[0].graph.kind == GraphKind::ErdosRenyi);
  CHECK(fig2[0].graph.p == 0.9);
  CHECK(fig2[0].stop.metric == Metric::DistanceSq);
  const auto fig1 = figure_preset("fig1_line", synthetic);
  CHECK(fig1[0].problem.kind == ProblemKind::LogisticSynthetic);
  CHECK(fig1[0].graph.kind == GraphKind::Line);
  CHECK(fig1[0].stop.metric == Metric::ObjectiveGap);

  CHECK_THROWS_AS(figure_preset("fig3", synthetic), Error);
  try {
    figure_preset("fig1_er01", PresetOptions{});
    FAIL("expected a data error without MNIST files");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Data);
  }
}

TEST_CASE("exit codes are distinct per outcome class") {
  std::set<int> codes;
  for (ErrorKind k : {ErrorKind::Config, ErrorKind::Data, ErrorKind::Numeric,
                      ErrorKind::NoConvergentStepsize, ErrorKind::ComparisonInvalid, ErrorKind::Io}) {
    CHECK(exit_code(k) != 0);
    codes.insert(exit_code(k));
  }
  CHECK(codes.size() == 6);
}
