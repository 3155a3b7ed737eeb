#include "adolf/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include <json.hpp>

#include "adolf/error.hpp"

namespace adolf {

using json = nlohmann::json;

namespace {

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::string csv_text(const Trace& trace) {
  std::ostringstream os;
  write_csv(os, trace);
  return os.str();
}

std::string grid_text(const GridSearchResult& grid) {
  std::ostringstream os;
  os << "alpha,status,iterations,comm_vector,terminal_metric\n";
  for (const GridPoint& p : grid.points) {
    os << format_double(p.alpha) << ',' << to_string(p.status) << ',';
    if (p.iterations) os << *p.iterations;
    os << ',' << p.comm_vector << ',';
    if (p.terminal_metric) os << format_double(*p.terminal_metric);
    os << '\n';
  }
  return os.str();
}

std::optional<double> first_hit(const Trace& trace, Metric metric, double threshold,
                                const TraceRecord** record) {
  for (const TraceRecord& r : trace.records) {
    const auto v = metric_value(r, metric);
    if (v && *v <= threshold) {
      *record = &r;
      return v;
    }
  }
  return std::nullopt;
}

}  // namespace

void write_atomically(const std::filesystem::path& path, const std::string& contents) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create directory '" + path.parent_path().string() + "'");
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write '" + tmp.string() + "'");
    out << contents;
    if (!out) throw Error(ErrorKind::Io, "write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot rename '" + tmp.string() + "': " + ec.message());
}

Graph build_graph(const GraphSpec& spec) {
  switch (spec.kind) {
    case GraphKind::Line: return make_line_graph(spec.agents);
    case GraphKind::Ring: return make_ring_graph(spec.agents);
    case GraphKind::Complete: return make_complete_graph(spec.agents);
    case GraphKind::ErdosRenyi: return make_erdos_renyi(spec.agents, spec.p, spec.seed);
  }
  throw config_error("unknown graph kind");
}

ProblemInstance build_problem(const ProblemSpec& spec) {
  switch (spec.kind) {
    case ProblemKind::Ridge:
      return synth_ridge(spec.agents, spec.samples, spec.dimension, spec.seed);
    case ProblemKind::LogisticSynthetic:
      return synth_logistic(spec.agents, spec.samples, spec.dimension, spec.seed, spec.noise);
    case ProblemKind::Mnist:
      // The first digit of the pair is labelled -1, the second +1.
      return load_mnist_partition(spec.images_path, spec.labels_path, spec.agents,
                                  {spec.digits.second, spec.digits.first}, spec.seed);
  }
  throw config_error("unknown problem kind");
}

Setup build_setup(const ExperimentConfig& config) {
  validate(config);
  const Graph graph = build_graph(config.graph);
  GossipMatrix gossip = psd_shift(metropolis_hastings(graph), config.c);
  ProblemInstance problem = build_problem(config.problem);
  std::optional<SaddlePoint> saddle;
  if (config.diagnostics.saddle) {
    try {
      saddle = compute_saddle(problem, gossip, config.diagnostics.saddle_tol,
                              config.diagnostics.saddle_max_iter);
    } catch (const NonConvergedError& e) {
      saddle = saddle_from_minimizer(problem, gossip, e.best_iterate());
      saddle->inexact = true;
    }
  }
  Matrix X0 = initial_point(problem.agents(), problem.dimension(),
                            config.init.gaussian ? std::optional<std::uint64_t>(config.init.seed)
                                                 : std::nullopt);
  return Setup{std::move(gossip), std::move(problem), std::move(saddle), std::move(X0)};
}

AlgorithmSpec algorithm_spec(const AlgorithmConfig& a) {
  if (a.name == "adolf") {
    AdolfOptions o;
    o.stepsize = a.stepsize;
    if (a.mode == "fixed") o.fixed = a.fixed;
    return o;
  }
  if (a.name == "adolf_local") return AdolfLocalOptions{a.stepsize};
  if (a.name == "condat_vu") return CondatVuOptions{a.fixed};
  if (a.name == "extra") return ExtraOptions{a.extra.alpha.value_or(0.0)};
  throw config_error("unknown algorithm '" + a.name + "'");
}

StopRule stop_rule(const ExperimentConfig& config) {
  StopRule s;
  s.max_iterations = config.stop.max_iter;
  s.metric = config.stop.metric;
  s.threshold = config.stop.threshold;
  s.cadence = config.diagnostics.every;
  return s;
}

Outcome execute(const ExperimentConfig& config, const Setup& setup) {
  RunDiagnostics diag;
  diag.saddle = setup.saddle ? &*setup.saddle : nullptr;
  diag.objective_gap = config.diagnostics.objective_gap;
  diag.merit = config.diagnostics.merit;
  diag.lyapunov = config.diagnostics.lyapunov;
  const StopRule stop = stop_rule(config);

  Outcome out;
  out.saddle_inexact = setup.saddle && setup.saddle->inexact;
  if (config.algorithm.name == "extra" && !config.algorithm.extra.alpha) {
    GridSearchResult grid = extra_grid_search(setup.problem, setup.gossip, setup.X0,
                                              config.algorithm.extra.grid, stop, diag);
    out.trace = grid.best_trace;
    out.grid = std::move(grid);
  } else {
    out.trace = run(algorithm_spec(config.algorithm), setup.problem, setup.gossip, setup.X0,
                    setup.X0, stop, diag);
  }
  return out;
}

Outcome execute(const ExperimentConfig& config) { return execute(config, build_setup(config)); }

std::filesystem::path output_dir(const ExperimentConfig& config,
                                 const std::filesystem::path& fallback) {
  if (!config.output.dir.empty()) return config.output.dir;
  return fallback.empty() ? std::filesystem::path(".") : fallback;
}

std::string manifest_json(const RunManifest& m) {
  json root;
  root["version"] = m.version;
  root["started"] = m.started;
  root["finished"] = m.finished;
  root["config"] = m.config_echo;
  json entries = json::array();
  for (const ManifestEntry& e : m.entries) {
    json j;
    j["label"] = e.label;
    j["algorithm"] = e.algorithm;
    j["kind"] = e.kind;
    j["path"] = e.path;
    j["status"] = e.status;
    j["iterations"] = e.iterations;
    j["consensus_iteration"] = e.consensus_iteration ? json(*e.consensus_iteration) : json();
    j["extra_alpha"] = e.extra_alpha ? json(*e.extra_alpha) : json();
    j["saddle_inexact"] = e.saddle_inexact;
    entries.push_back(j);
  }
  root["runs"] = entries;
  return root.dump(2) + "\n";
}

namespace {

ManifestEntry trace_entry(const ExperimentConfig& config, const Outcome& outcome,
                          const std::filesystem::path& csv) {
  ManifestEntry e;
  e.label = config.output.name;
  e.algorithm = config.algorithm.name;
  e.kind = "trace";
  e.path = csv.string();
  e.status = to_string(outcome.trace.status);
  e.iterations = outcome.trace.iterations;
  e.consensus_iteration = outcome.trace.consensus_iteration;
  if (outcome.grid) {
    e.extra_alpha = outcome.grid->best_alpha;
  } else if (config.algorithm.name == "extra") {
    e.extra_alpha = config.algorithm.extra.alpha;
  }
  e.saddle_inexact = outcome.saddle_inexact;
  return e;
}

void write_outcome(const ExperimentConfig& config, const Outcome& outcome,
                   const std::filesystem::path& dir, RunManifest& manifest) {
  const std::filesystem::path csv = dir / (config.output.name + ".csv");
  write_atomically(csv, csv_text(outcome.trace));
  manifest.entries.push_back(trace_entry(config, outcome, csv));
  if (outcome.trace.status == RunStatus::Diverged) manifest.diverged = true;
  if (outcome.grid) {
    const std::filesystem::path grid_csv = dir / (config.output.name + "_grid.csv");
    write_atomically(grid_csv, grid_text(*outcome.grid));
    ManifestEntry g;
    g.label = config.output.name;
    g.algorithm = config.algorithm.name;
    g.kind = "grid";
    g.path = grid_csv.string();
    g.status = to_string(outcome.trace.status);
    g.iterations = outcome.trace.iterations;
    g.extra_alpha = outcome.grid->best_alpha;
    manifest.entries.push_back(g);
  }
}

}  // namespace

RunManifest run_experiment(const ExperimentConfig& config,
                           const std::filesystem::path& fallback_dir) {
  RunManifest manifest;
  manifest.version = ADOLF_VERSION;
  manifest.started = utc_now();
  manifest.config_echo = split_lines(emit_config(config));
  const std::filesystem::path dir = output_dir(config, fallback_dir);
  const Outcome outcome = execute(config);
  write_outcome(config, outcome, dir, manifest);
  manifest.finished = utc_now();
  write_atomically(dir / (config.output.name + ".manifest.json"), manifest_json(manifest));
  return manifest;
}

// ---------------------------------------------------------------------------
// Comparisons

namespace {

void check_comparable(const std::vector<ExperimentConfig>& configs) {
  if (configs.empty()) throw config_error("compare needs at least one config");
  const ExperimentConfig& ref = configs.front();
  for (std::size_t i = 1; i < configs.size(); ++i) {
    const ExperimentConfig& c = configs[i];
    std::string what;
    if (!(c.problem == ref.problem)) what = "problem";
    else if (!(c.graph == ref.graph)) what = "graph";
    else if (c.c != ref.c) what = "gossip shift";
    else if (!(c.init == ref.init)) what = "initial point";
    if (!what.empty()) {
      throw Error(ErrorKind::ComparisonInvalid,
                  "config '" + c.output.name + "' differs from '" + ref.output.name + "' in its " +
                      what + " specification");
    }
  }
  std::set<std::string> labels;
  for (const auto& c : configs) {
    if (!labels.insert(c.output.name).second) {
      throw Error(ErrorKind::ComparisonInvalid,
                  "two configs share the output name '" + c.output.name + "'");
    }
  }
}

Comparison compare_with(const std::vector<ExperimentConfig>& configs, const Setup& setup,
                        std::vector<Outcome>* outcomes) {
  Comparison cmp;
  const ExperimentConfig& ref = configs.front();
  cmp.metric = ref.stop.metric.value_or(Metric::DistanceSq);
  cmp.threshold = ref.stop.threshold;
  for (const ExperimentConfig& config : configs) {
    Outcome outcome = execute(config, setup);
    ComparisonRow row;
    row.label = config.output.name;
    row.algorithm = config.algorithm.name;
    row.status = outcome.trace.status;
    const TraceRecord* hit = nullptr;
    if (first_hit(outcome.trace, cmp.metric, cmp.threshold, &hit)) {
      row.comm_vector = hit->comm_vector;
      row.comm_scalar = hit->comm_scalar;
      row.iterations = hit->k;
    }
    for (auto it = outcome.trace.records.rbegin(); it != outcome.trace.records.rend(); ++it) {
      if (auto v = metric_value(*it, cmp.metric)) {
        row.final_metric = v;
        break;
      }
    }
    if (outcome.grid) row.extra_alpha = outcome.grid->best_alpha;
    else if (config.algorithm.name == "extra") row.extra_alpha = config.algorithm.extra.alpha;
    cmp.rows.push_back(row);
    cmp.traces.push_back(outcome.trace);
    if (outcomes) outcomes->push_back(std::move(outcome));
  }
  return cmp;
}

}  // namespace

Comparison compare(const std::vector<ExperimentConfig>& configs) {
  check_comparable(configs);
  return compare_with(configs, build_setup(configs.front()), nullptr);
}

void write_long_csv(std::ostream& os, const Comparison& cmp) {
  os << "algorithm,k,comm_vector,comm_scalar," << to_string(cmp.metric) << '\n';
  for (std::size_t i = 0; i < cmp.rows.size(); ++i) {
    for (const TraceRecord& r : cmp.traces[i].records) {
      const auto v = metric_value(r, cmp.metric);
      if (!v) continue;
      os << cmp.rows[i].label << ',' << r.k << ',' << r.comm_vector << ',' << r.comm_scalar << ','
         << format_double(*v) << '\n';
    }
  }
}

void write_gnuplot(std::ostream& os, const Comparison& cmp) {
  for (std::size_t i = 0; i < cmp.rows.size(); ++i) {
    if (i > 0) os << "\n\n";
    os << "# " << cmp.rows[i].label << '\n';
    os << "# comm_vector comm_scalar " << to_string(cmp.metric) << '\n';
    for (const TraceRecord& r : cmp.traces[i].records) {
      const auto v = metric_value(r, cmp.metric);
      if (!v) continue;
      os << r.comm_vector << ' ' << r.comm_scalar << ' ' << format_double(*v) << '\n';
    }
  }
}

void write_summary_csv(std::ostream& os, const Comparison& cmp) {
  os << "algorithm,status,threshold,comm_vector,comm_scalar,iterations,final_metric,alpha\n";
  for (const ComparisonRow& r : cmp.rows) {
    os << r.label << ',' << to_string(r.status) << ',' << format_double(cmp.threshold) << ',';
    if (r.comm_vector) os << *r.comm_vector << ',' << *r.comm_scalar << ',' << *r.iterations;
    else os << "budget,budget,budget";
    os << ',';
    if (r.final_metric) os << format_double(*r.final_metric);
    os << ',';
    if (r.extra_alpha) os << format_double(*r.extra_alpha);
    os << '\n';
  }
}

std::string format_summary(const Comparison& cmp) {
  std::ostringstream os;
  os << "metric " << to_string(cmp.metric) << " <= " << cmp.threshold << '\n';
  int width = 10;
  for (const ComparisonRow& r : cmp.rows) width = std::max(width, static_cast<int>(r.label.size()) + 2);
  os << std::left << std::setw(width) << "algorithm" << std::setw(11) << "status" << std::setw(13)
     << "comm_vector" << std::setw(13) << "comm_scalar" << std::setw(12) << "iterations"
     << std::setw(14) << "final" << "alpha\n";
  for (const ComparisonRow& r : cmp.rows) {
    os << std::setw(width) << r.label << std::setw(11) << to_string(r.status);
    if (r.comm_vector) {
      os << std::setw(13) << *r.comm_vector << std::setw(13) << *r.comm_scalar << std::setw(12)
         << *r.iterations;
    } else {
      os << std::setw(13) << "budget" << std::setw(13) << "budget" << std::setw(12) << "budget";
    }
    std::ostringstream fm;
    if (r.final_metric) fm << std::setprecision(4) << *r.final_metric;
    os << std::setw(14) << fm.str();
    if (r.extra_alpha) os << std::setprecision(4) << *r.extra_alpha;
    os << '\n';
  }
  return os.str();
}

RunManifest compare_experiments(const std::vector<ExperimentConfig>& configs,
                                const std::filesystem::path& dir, const std::string& stem,
                                Comparison* out) {
  check_comparable(configs);
  RunManifest manifest;
  manifest.version = ADOLF_VERSION;
  manifest.started = utc_now();
  for (const auto& c : configs) {
    for (auto& line : split_lines(emit_config(c))) manifest.config_echo.push_back(line);
  }
  const Setup setup = build_setup(configs.front());
  std::vector<Outcome> outcomes;
  Comparison cmp = compare_with(configs, setup, &outcomes);
  for (std::size_t i = 0; i < configs.size(); ++i) {
    write_outcome(configs[i], outcomes[i], dir, manifest);
  }

  const auto add = [&](const std::string& suffix, const std::string& text) {
    const std::filesystem::path p = dir / (stem + suffix);
    write_atomically(p, text);
    ManifestEntry e;
    e.label = stem;
    e.algorithm = "compare";
    e.kind = "comparison";
    e.path = p.string();
    e.status = "done";
    manifest.entries.push_back(e);
  };
  std::ostringstream long_csv;
  write_long_csv(long_csv, cmp);
  add("_long.csv", long_csv.str());
  std::ostringstream summary;
  write_summary_csv(summary, cmp);
  add("_summary.csv", summary.str());
  std::ostringstream dat;
  write_gnuplot(dat, cmp);
  add(".dat", dat.str());

  manifest.finished = utc_now();
  write_atomically(dir / (stem + ".manifest.json"), manifest_json(manifest));
  if (out) *out = std::move(cmp);
  return manifest;
}

// ---------------------------------------------------------------------------
// Figure presets

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"fig1_line", "fig1_er01", "fig1_er09",
                                                 "fig2_line", "fig2_er01", "fig2_er09"};
  return names;
}

std::vector<ExperimentConfig> figure_preset(const std::string& name, const PresetOptions& options) {
  const auto& names = preset_names();
  if (std::find(names.begin(), names.end(), name) == names.end()) {
    throw config_error("unknown preset '" + name + "'");
  }
  const bool logistic = name.rfind("fig1", 0) == 0;

  ExperimentConfig base;
  base.seed = options.seed;
  base.problem.agents = 20;
  base.problem.seed = options.seed + kDataSeedOffset;
  if (logistic) {
    const bool have_mnist = options.images_path && options.labels_path;
    if (have_mnist) {
      base.problem.kind = ProblemKind::Mnist;
      base.problem.images_path = *options.images_path;
      base.problem.labels_path = *options.labels_path;
      base.problem.samples = 0;
      base.problem.dimension = 0;
      base.problem.noise = 0.0;
    } else if (options.synthetic_logistic) {
      base.problem.kind = ProblemKind::LogisticSynthetic;
      base.problem.samples = 50;
      base.problem.dimension = 20;
      base.problem.noise = 0.1;
    } else {
      throw data_error("preset '" + name +
                       "' needs MNIST image and label paths, or --synthetic-logistic");
    }
    base.stop.max_iter = 5000;
    base.stop.metric = Metric::ObjectiveGap;
    base.stop.threshold = 1e-8;
  } else {
    base.problem.kind = ProblemKind::Ridge;
    base.problem.samples = 20;
    base.problem.dimension = 500;
    base.problem.noise = 0.0;
    base.stop.max_iter = 20000;
    base.stop.metric = Metric::DistanceSq;
    base.stop.threshold = 1e-10;
  }

  base.graph.agents = 20;
  if (name.ends_with("line")) {
    base.graph.kind = GraphKind::Line;
    base.graph.p = 0.0;
    base.graph.seed = 0;
  } else {
    base.graph.kind = GraphKind::ErdosRenyi;
    base.graph.p = name.ends_with("er01") ? 0.1 : 0.9;
    base.graph.seed = options.seed + kGraphSeedOffset;
  }
  base.init.seed = options.seed + kInitSeedOffset;
  base.diagnostics.every = 10;
  base.diagnostics.merit = false;
  base.diagnostics.lyapunov = false;

  std::vector<ExperimentConfig> out;
  ExperimentConfig extra = base;
  extra.algorithm.name = "extra";
  extra.algorithm.mode = "fixed";
  extra.algorithm.extra.grid = default_extra_grid();
  extra.output.name = "extra";
  out.push_back(extra);

  ExperimentConfig adolf = base;
  adolf.algorithm.name = "adolf";
  if (logistic) {
    adolf.algorithm.mode = "convex";
    adolf.algorithm.stepsize = StepsizeParams::convex_defaults();
  } else {
    adolf.algorithm.mode = "strongly_convex";
    adolf.algorithm.stepsize = StepsizeParams::strongly_convex_defaults();
  }
  adolf.output.name = "adolf";
  out.push_back(adolf);

  ExperimentConfig local = base;
  local.algorithm.name = "adolf_local";
  local.algorithm.mode = logistic ? "convex" : "strongly_convex";
  local.algorithm.stepsize = StepsizeParams::local_defaults(!logistic);
  local.output.name = "adolf_local";
  out.push_back(local);

  for (const auto& c : out) validate(c);
  return out;
}

}  // namespace adolf
