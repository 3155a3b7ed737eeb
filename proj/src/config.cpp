#include "adolf/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "adolf/error.hpp"

namespace adolf {

using json = nlohmann::json;

namespace {

// Reads one JSON object, remembering which keys were consumed so that
// leftovers can be reported as unknown.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw config_error("'" + label() + "' must be an object");
  }

  bool has(const std::string& key) const { return node_.contains(key); }

  std::string key_path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  const json& raw(const std::string& key) {
    used_.insert(key);
    return node_.at(key);
  }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_number()) throw config_error("'" + key_path(key) + "' must be a number");
    return v.get<double>();
  }

  int integer(const std::string& key, int fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_number_integer()) throw config_error("'" + key_path(key) + "' must be an integer");
    return v.get<int>();
  }

  std::uint64_t seed(const std::string& key, std::uint64_t fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
      throw config_error("'" + key_path(key) + "' must be a nonnegative integer");
    }
    return v.get<std::uint64_t>();
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_boolean()) throw config_error("'" + key_path(key) + "' must be true or false");
    return v.get<bool>();
  }

  std::string text(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_string()) throw config_error("'" + key_path(key) + "' must be a string");
    return v.get<std::string>();
  }

  Section child(const std::string& key) { return Section(raw(key), key_path(key)); }

  void finish() const {
    for (auto it = node_.begin(); it != node_.end(); ++it) {
      if (!used_.count(it.key())) throw config_error("unknown key '" + key_path(it.key()) + "'");
    }
  }

 private:
  std::string label() const { return path_.empty() ? "<root>" : path_; }

  const json& node_;
  std::string path_;
  std::set<std::string> used_;
};

ProblemKind parse_problem_kind(const std::string& s) {
  if (s == "ridge") return ProblemKind::Ridge;
  if (s == "logistic_synthetic") return ProblemKind::LogisticSynthetic;
  if (s == "mnist") return ProblemKind::Mnist;
  throw config_error("'problem.type' must be ridge, logistic_synthetic or mnist (got '" + s + "')");
}

GraphKind parse_graph_kind(const std::string& s) {
  if (s == "line") return GraphKind::Line;
  if (s == "ring") return GraphKind::Ring;
  if (s == "complete") return GraphKind::Complete;
  if (s == "erdos_renyi") return GraphKind::ErdosRenyi;
  throw config_error("'graph.type' must be line, ring, complete or erdos_renyi (got '" + s + "')");
}

GrowthPolicy parse_growth(Section s) {
  const std::string kind = s.text("kind", "");
  GrowthPolicy out;
  if (kind == "unbounded") {
    out = UnboundedGrowth{};
  } else if (kind == "additive_summable") {
    out = AdditiveSummableGrowth{s.number("a", kUnitSummableIncrement)};
  } else if (kind == "ratio_power") {
    out = RatioPowerGrowth{s.number("beta1", 10.0), s.number("beta2", 1.0)};
  } else {
    throw config_error("'" + s.key_path("kind") +
                       "' must be unbounded, additive_summable or ratio_power");
  }
  s.finish();
  return out;
}

SigmaSchedule parse_sigma(Section s) {
  const std::string kind = s.text("kind", "");
  SigmaSchedule out;
  if (kind == "constant") {
    out = ConstantSigma{s.number("value", 1.0)};
  } else if (kind == "inverse_alpha_sq") {
    out = InverseAlphaSqSigma{s.number("value", 0.2)};
  } else {
    throw config_error("'" + s.key_path("kind") + "' must be constant or inverse_alpha_sq");
  }
  s.finish();
  return out;
}

FixedParameters parse_fixed(Section s) {
  FixedParameters f;
  f.alpha = s.number("alpha", f.alpha);
  f.sigma = s.number("sigma", f.sigma);
  f.gamma = s.number("gamma", f.gamma);
  s.finish();
  return f;
}

void parse_stepsize_overrides(Section& a, StepsizeParams& p, bool local) {
  p.c1 = a.number("c1", p.c1);
  p.c2 = a.number("c2", p.c2);
  p.alpha0 = a.number("alpha0", p.alpha0);
  if (local) p.eta = a.number("eta", p.eta);
  if (a.has("growth")) p.growth = parse_growth(a.child("growth"));
  if (a.has("sigma")) p.sigma = parse_sigma(a.child("sigma"));
}

std::vector<double> parse_grid(Section& a) {
  const json& g = a.raw("grid");
  if (g.is_array()) {
    std::vector<double> out;
    for (const auto& v : g) {
      if (!v.is_number()) throw config_error("'algorithm.grid' entries must be numbers");
      out.push_back(v.get<double>());
    }
    return out;
  }
  Section s(g, "algorithm.grid");
  const double lo = s.number("lo", 1e-5);
  const double hi = s.number("hi", 10.0);
  const int points = s.integer("points", 20);
  s.finish();
  if (!(lo > 0.0 && hi >= lo) || points < 1) {
    throw config_error("'algorithm.grid' needs 0 < lo <= hi and points >= 1");
  }
  return log_grid(lo, hi, points);
}

AlgorithmConfig parse_algorithm(Section a) {
  AlgorithmConfig out;
  if (!a.has("name")) throw config_error("missing key 'algorithm.name'");
  out.name = a.text("name", "");
  if (out.name == "adolf") {
    out.mode = a.text("mode", "convex");
    if (out.mode == "convex") {
      out.stepsize = StepsizeParams::convex_defaults();
    } else if (out.mode == "strongly_convex") {
      out.stepsize = StepsizeParams::strongly_convex_defaults();
    } else if (out.mode == "fixed") {
      out.stepsize = StepsizeParams::convex_defaults();
    } else {
      throw config_error("'algorithm.mode' must be convex, strongly_convex or fixed for adolf");
    }
    if (out.mode == "fixed") {
      if (a.has("fixed")) out.fixed = parse_fixed(a.child("fixed"));
    } else {
      parse_stepsize_overrides(a, out.stepsize, false);
    }
  } else if (out.name == "adolf_local") {
    out.mode = a.text("mode", "convex");
    if (out.mode != "convex" && out.mode != "strongly_convex") {
      throw config_error("'algorithm.mode' must be convex or strongly_convex for adolf_local");
    }
    out.stepsize = StepsizeParams::local_defaults(out.mode == "strongly_convex");
    parse_stepsize_overrides(a, out.stepsize, true);
  } else if (out.name == "condat_vu") {
    out.mode = "fixed";
    if (a.has("fixed")) out.fixed = parse_fixed(a.child("fixed"));
  } else if (out.name == "extra") {
    out.mode = "fixed";
    if (a.has("alpha")) out.extra.alpha = a.number("alpha", 0.0);
    if (a.has("grid")) {
      if (out.extra.alpha) throw config_error("'algorithm' may set alpha or grid, not both");
      out.extra.grid = parse_grid(a);
    }
    if (!out.extra.alpha && out.extra.grid.empty()) out.extra.grid = default_extra_grid();
  } else {
    throw config_error("'algorithm.name' must be adolf, adolf_local, extra or condat_vu (got '" +
                       out.name + "')");
  }
  a.finish();
  return out;
}

json emit_growth(const GrowthPolicy& g) {
  if (std::holds_alternative<UnboundedGrowth>(g)) return {{"kind", "unbounded"}};
  if (const auto* a = std::get_if<AdditiveSummableGrowth>(&g)) {
    return {{"kind", "additive_summable"}, {"a", a->a}};
  }
  const auto& r = std::get<RatioPowerGrowth>(g);
  return {{"kind", "ratio_power"}, {"beta1", r.beta1}, {"beta2", r.beta2}};
}

json emit_sigma(const SigmaSchedule& s) {
  if (const auto* c = std::get_if<ConstantSigma>(&s)) {
    return {{"kind", "constant"}, {"value", c->sigma_bar}};
  }
  return {{"kind", "inverse_alpha_sq"}, {"value", std::get<InverseAlphaSqSigma>(s).sigma}};
}

json emit_fixed(const FixedParameters& f) {
  return {{"alpha", f.alpha}, {"sigma", f.sigma}, {"gamma", f.gamma}};
}

}  // namespace

const char* to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::Ridge: return "ridge";
    case ProblemKind::LogisticSynthetic: return "logistic_synthetic";
    case ProblemKind::Mnist: return "mnist";
  }
  return "unknown";
}

const char* to_string(GraphKind kind) {
  switch (kind) {
    case GraphKind::Line: return "line";
    case GraphKind::Ring: return "ring";
    case GraphKind::Complete: return "complete";
    case GraphKind::ErdosRenyi: return "erdos_renyi";
  }
  return "unknown";
}

std::vector<double> default_extra_grid() { return log_grid(1e-5, 10.0, 20); }

ExperimentConfig parse_config_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw config_error(std::string("invalid JSON: ") + e.what());
  }
  Section r(root, "");
  ExperimentConfig c;
  c.seed = r.seed("seed", c.seed);

  if (!r.has("problem")) throw config_error("missing section 'problem'");
  {
    Section p = r.child("problem");
    ProblemSpec& ps = c.problem;
    ps.kind = parse_problem_kind(p.text("type", "ridge"));
    ps.agents = p.integer("agents", ps.agents);
    if (ps.kind == ProblemKind::Mnist) {
      ps.images_path = p.text("images", "");
      ps.labels_path = p.text("labels", "");
      if (p.has("digits")) {
        const json& dg = p.raw("digits");
        if (!dg.is_array() || dg.size() != 2 || !dg[0].is_number_integer() ||
            !dg[1].is_number_integer()) {
          throw config_error("'problem.digits' must be a pair of integers");
        }
        ps.digits = {dg[0].get<int>(), dg[1].get<int>()};
      }
      ps.samples = 0;
      ps.dimension = 0;
      ps.noise = 0.0;
    } else {
      ps.samples = p.integer("samples", ps.samples);
      ps.dimension = p.integer("dimension", ps.dimension);
      if (ps.kind == ProblemKind::LogisticSynthetic) {
        ps.noise = p.number("noise", ps.noise);
      } else {
        ps.noise = 0.0;
      }
    }
    ps.seed = p.seed("seed", c.seed + kDataSeedOffset);
    p.finish();
  }

  if (r.has("graph")) {
    Section g = r.child("graph");
    c.graph.kind = parse_graph_kind(g.text("type", "line"));
    c.graph.agents = g.integer("agents", c.problem.agents);
    if (c.graph.kind == GraphKind::ErdosRenyi) {
      if (!g.has("p")) throw config_error("missing key 'graph.p'");
      c.graph.p = g.number("p", 0.0);
      c.graph.seed = g.seed("seed", c.seed + kGraphSeedOffset);
    } else {
      c.graph.p = 0.0;
      c.graph.seed = 0;
    }
    g.finish();
  } else {
    c.graph.kind = GraphKind::Line;
    c.graph.agents = c.problem.agents;
    c.graph.p = 0.0;
    c.graph.seed = 0;
  }

  if (r.has("gossip")) {
    Section g = r.child("gossip");
    c.c = g.number("c", c.c);
    g.finish();
  }

  if (!r.has("algorithm")) throw config_error("missing section 'algorithm'");
  c.algorithm = parse_algorithm(r.child("algorithm"));

  c.init.seed = c.seed + kInitSeedOffset;
  if (r.has("init")) {
    Section s = r.child("init");
    const std::string x0 = s.text("x0", "gaussian");
    if (x0 != "gaussian" && x0 != "zeros") {
      throw config_error("'init.x0' must be gaussian or zeros");
    }
    c.init.gaussian = x0 == "gaussian";
    c.init.seed = s.seed("seed", c.init.seed);
    s.finish();
  }
  if (!c.init.gaussian) c.init.seed = 0;

  if (r.has("stop")) {
    Section s = r.child("stop");
    c.stop.max_iter = s.integer("max_iter", c.stop.max_iter);
    if (s.has("metric")) {
      const std::string name = s.text("metric", "");
      c.stop.metric = parse_metric(name);
      if (!c.stop.metric) throw config_error("'stop.metric' is not a known metric: '" + name + "'");
      if (!s.has("threshold")) throw config_error("missing key 'stop.threshold'");
    }
    c.stop.threshold = s.number("threshold", c.stop.threshold);
    s.finish();
  }

  if (r.has("diagnostics")) {
    Section s = r.child("diagnostics");
    DiagnosticsSpec& d = c.diagnostics;
    d.every = s.integer("every", d.every);
    d.saddle = s.boolean("saddle", d.saddle);
    d.saddle_tol = s.number("saddle_tol", d.saddle_tol);
    d.saddle_max_iter = s.integer("saddle_max_iter", d.saddle_max_iter);
    d.objective_gap = s.boolean("objective_gap", d.objective_gap);
    d.merit = s.boolean("merit", d.merit);
    d.lyapunov = s.boolean("lyapunov", d.lyapunov);
    s.finish();
  }

  if (r.has("output")) {
    Section s = r.child("output");
    c.output.dir = s.text("dir", "");
    c.output.name = s.text("name", "");
    s.finish();
  }
  if (c.output.name.empty()) c.output.name = c.algorithm.name;
  r.finish();

  validate(c);
  return c;
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

void validate(const ExperimentConfig& c) {
  const ProblemSpec& p = c.problem;
  if (p.agents < 2) throw config_error("'problem.agents' must be at least 2");
  if (p.kind != ProblemKind::Mnist) {
    if (p.samples < 1) throw config_error("'problem.samples' must be positive");
    if (p.dimension < 1) throw config_error("'problem.dimension' must be positive");
  }
  if (p.kind == ProblemKind::LogisticSynthetic && !(p.noise >= 0.0 && p.noise < 0.5)) {
    throw config_error("'problem.noise' must lie in [0, 0.5)");
  }
  if (p.kind == ProblemKind::Mnist) {
    if (p.images_path.empty() || p.labels_path.empty()) {
      throw config_error("'problem.images' and 'problem.labels' are required for mnist");
    }
    const auto ok = [](int v) { return v >= 0 && v <= 9; };
    if (!ok(p.digits.first) || !ok(p.digits.second) || p.digits.first == p.digits.second) {
      throw config_error("'problem.digits' must be two distinct digits");
    }
  }
  if (c.graph.agents != p.agents) {
    throw config_error("'graph.agents' (" + std::to_string(c.graph.agents) +
                       ") must equal 'problem.agents' (" + std::to_string(p.agents) + ")");
  }
  if (c.graph.kind == GraphKind::ErdosRenyi && !(c.graph.p > 0.0 && c.graph.p <= 1.0)) {
    throw config_error("'graph.p' must lie in (0, 1]");
  }
  if (c.graph.kind == GraphKind::Ring && c.graph.agents < 3) {
    throw config_error("'graph.type' ring needs at least 3 agents");
  }
  if (!(c.c > 0.0 && c.c < 0.5)) throw config_error("'gossip.c': c must lie in (0, 1/2)");

  const AlgorithmConfig& a = c.algorithm;
  if (a.name == "adolf" || a.name == "adolf_local") {
    if (a.mode != "fixed") {
      try {
        validate(a.stepsize);
      } catch (const Error& e) {
        throw config_error(std::string("'algorithm': ") + e.what());
      }
    }
  }
  if ((a.name == "adolf" && a.mode == "fixed") || a.name == "condat_vu") {
    if (!(a.fixed.alpha > 0.0 && a.fixed.sigma > 0.0 && a.fixed.gamma > 0.0)) {
      throw config_error("'algorithm.fixed': alpha, sigma and gamma must be positive");
    }
  }
  if (a.name == "extra") {
    if (a.extra.alpha && !(*a.extra.alpha > 0.0)) {
      throw config_error("'algorithm.alpha' must be positive");
    }
    for (double g : a.extra.grid) {
      if (!(g > 0.0)) throw config_error("'algorithm.grid' entries must be positive");
    }
    if (!a.extra.alpha && !c.stop.metric) {
      throw config_error("EXTRA grid search needs 'stop.metric' to rank stepsizes");
    }
  }

  if (c.stop.max_iter < 0) throw config_error("'stop.max_iter' must be nonnegative");
  if (c.stop.metric && *c.stop.metric != Metric::ConsensusErr && !c.diagnostics.saddle) {
    throw config_error("'stop.metric' needs 'diagnostics.saddle' = true");
  }
  if (c.diagnostics.every < 1) throw config_error("'diagnostics.every' must be at least 1");
  if (!(c.diagnostics.saddle_tol > 0.0)) throw config_error("'diagnostics.saddle_tol' must be positive");
  if (c.diagnostics.saddle_max_iter < 1) {
    throw config_error("'diagnostics.saddle_max_iter' must be positive");
  }
  if (c.output.name.empty() || c.output.name.find('/') != std::string::npos) {
    throw config_error("'output.name' must be a nonempty file stem");
  }
}

std::string emit_config(const ExperimentConfig& c) {
  json root;
  root["seed"] = c.seed;

  json p;
  p["type"] = to_string(c.problem.kind);
  p["agents"] = c.problem.agents;
  if (c.problem.kind == ProblemKind::Mnist) {
    p["images"] = c.problem.images_path;
    p["labels"] = c.problem.labels_path;
    p["digits"] = {c.problem.digits.first, c.problem.digits.second};
  } else {
    p["samples"] = c.problem.samples;
    p["dimension"] = c.problem.dimension;
    if (c.problem.kind == ProblemKind::LogisticSynthetic) p["noise"] = c.problem.noise;
  }
  p["seed"] = c.problem.seed;
  root["problem"] = p;

  json g;
  g["type"] = to_string(c.graph.kind);
  g["agents"] = c.graph.agents;
  if (c.graph.kind == GraphKind::ErdosRenyi) {
    g["p"] = c.graph.p;
    g["seed"] = c.graph.seed;
  }
  root["graph"] = g;
  root["gossip"] = {{"c", c.c}};

  const AlgorithmConfig& a = c.algorithm;
  json alg;
  alg["name"] = a.name;
  if (a.name == "adolf" || a.name == "adolf_local") {
    alg["mode"] = a.mode;
    if (a.mode == "fixed") {
      alg["fixed"] = emit_fixed(a.fixed);
    } else {
      alg["c1"] = a.stepsize.c1;
      alg["c2"] = a.stepsize.c2;
      alg["alpha0"] = a.stepsize.alpha0;
      if (a.name == "adolf_local") alg["eta"] = a.stepsize.eta;
      alg["growth"] = emit_growth(a.stepsize.growth);
      alg["sigma"] = emit_sigma(a.stepsize.sigma);
    }
  } else if (a.name == "condat_vu") {
    alg["fixed"] = emit_fixed(a.fixed);
  } else if (a.name == "extra") {
    if (a.extra.alpha) {
      alg["alpha"] = *a.extra.alpha;
    } else {
      alg["grid"] = a.extra.grid;
    }
  }
  root["algorithm"] = alg;

  json init;
  init["x0"] = c.init.gaussian ? "gaussian" : "zeros";
  if (c.init.gaussian) init["seed"] = c.init.seed;
  root["init"] = init;

  json stop;
  stop["max_iter"] = c.stop.max_iter;
  if (c.stop.metric) stop["metric"] = to_string(*c.stop.metric);
  stop["threshold"] = c.stop.threshold;
  root["stop"] = stop;

  root["diagnostics"] = {{"every", c.diagnostics.every},
                         {"saddle", c.diagnostics.saddle},
                         {"saddle_tol", c.diagnostics.saddle_tol},
                         {"saddle_max_iter", c.diagnostics.saddle_max_iter},
                         {"objective_gap", c.diagnostics.objective_gap},
                         {"merit", c.diagnostics.merit},
                         {"lyapunov", c.diagnostics.lyapunov}};
  json out;
  if (!c.output.dir.empty()) out["dir"] = c.output.dir;
  out["name"] = c.output.name;
  root["output"] = out;
  return root.dump(2) + "\n";
}

}  // namespace adolf
