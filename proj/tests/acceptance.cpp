// Acceptance runner: one PASS/FAIL line per criterion; exits nonzero if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "adolf/config.hpp"
#include "adolf/experiment.hpp"
#include "adolf/run.hpp"
#include "adolf/solvers.hpp"
#include "instances.hpp"

namespace {

using namespace adolf;
using adolf::testing::Instance;
using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass;
  std::string detail;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Tolerances and budgets, pinned.
constexpr double kEquivalenceTol = 1e-10;
constexpr double kLyapunovSlack = 1e-10;
constexpr double kCertificateTol = 1e-12;
constexpr double kMeritFloor = -1e-10;
constexpr double kPowerSlopeMax = -0.9;
constexpr double kPowerR2Min = 0.9;
constexpr double kGeometricR2Linear = 0.95;
constexpr double kGeometricR2Local = 0.9;
constexpr double kDistanceTarget = 1e-8;
// Linear-rate runs continue past the target so the tail window is asymptotic.
constexpr double kTailStop = 1e-16;
// Local runs stop above the roundoff floor; see README.
constexpr double kLocalStop = 1e-20;
constexpr int kLinearBudget = 100000;
constexpr int kConsensusBound = 2000;
constexpr double kLocalAlphaFloor = 1e-6;
constexpr double kBaselineTarget = 1e-6;
constexpr double kBaselineFactor = 2.0;
constexpr double kFiniteDifferenceTol = 1e-6;
constexpr double kGossipTol = 1e-12;
constexpr double kSqrtTol = 1e-10;
constexpr double kColumnSumTol = 1e-9;
constexpr double kShadowTol = 1e-8;

double global_smoothness(const ProblemInstance& problem) {
  double L = 0.0;
  for (int i = 0; i < problem.agents(); ++i) {
    const auto q = problem.local(i).quadratic_form();
    Eigen::SelfAdjointEigenSolver<Matrix> es(q->hessian);
    L = std::max(L, es.eigenvalues().maxCoeff());
  }
  return L;
}

// Lyapunov descent from k = 1 on, relative slack (1 + V^k).
bool lyapunov_nonincreasing(const Trace& trace, int last_k, double* worst) {
  *worst = 0.0;
  bool ok = true;
  for (std::size_t i = 1; i < trace.records.size(); ++i) {
    const TraceRecord& prev = trace.records[i - 1];
    const TraceRecord& cur = trace.records[i];
    if (prev.k < 1 || cur.k > last_k) continue;
    if (!prev.lyapunov || !cur.lyapunov) return false;
    const double excess = (*cur.lyapunov - *prev.lyapunov) / (1.0 + *prev.lyapunov);
    *worst = std::max(*worst, excess);
    if (excess > kLyapunovSlack) ok = false;
  }
  return ok;
}

// ---------------------------------------------------------------------------

Verdict criterion1() {
  const auto start = Clock::now();
  const Instance inst = adolf::testing::ring_ridge();
  const FixedParameters fixed{1e-2, 1.0, 1.0};
  AdolfOptions ao;
  ao.fixed = fixed;
  AdolfState a = adolf_start(inst.X0, inst.X0, ao);
  CondatVuState cv = condat_vu_start(inst.X0, inst.X0, inst.gossip, CondatVuOptions{fixed});
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    a = adolf_step(std::move(a), inst.problem, inst.gossip, ao);
    cv = condat_vu_step(std::move(cv), inst.problem);
    worst = std::max(worst, (a.X_now - cv.X_now).norm());
    worst = std::max(worst, (a.D - cv.L_op * cv.Y).norm());
  }
  const double t = seconds_since(start);
  return {worst <= kEquivalenceTol && t < 1.0,
          "max |X_adolf - X_cv| = " + fmt(worst) + " over 100 iterations, " + fmt(t) + " s"};
}

Verdict criterion2() {
  const Instance inst = adolf::testing::line_ridge();
  const double L = global_smoothness(inst.problem);
  const double sigma = 1.0;
  const double alpha = 0.99 / (std::sqrt(L * L + 2.0 * sigma) + L);
  StopRule stop;
  stop.max_iterations = 500;
  RunDiagnostics diag;
  diag.saddle = &inst.saddle;
  const Trace trace = run(CondatVuOptions{{alpha, sigma, 1.0}}, inst.problem, inst.gossip, inst.X0,
                          inst.X0, stop, diag);
  double worst = 0.0;
  const bool ok = lyapunov_nonincreasing(trace, 500, &worst);
  return {ok && trace.records.size() == 501,
          "L = " + fmt(L) + ", alpha = " + fmt(alpha) + ", worst relative increase " + fmt(worst)};
}

struct LogisticRun {
  Instance inst;
  Trace trace;
  double seconds;
};

const LogisticRun& logistic_run() {
  static const LogisticRun result = [] {
    const auto start = Clock::now();
    Instance inst = adolf::testing::logistic10();
    AdolfOptions o;
    o.stepsize = StepsizeParams::convex_defaults();
    o.stepsize.c1 = 0.9;
    o.stepsize.c2 = 0.9;
    o.stepsize.sigma = ConstantSigma{1.0};
    StopRule stop;
    stop.max_iterations = 2000;
    RunDiagnostics diag;
    diag.saddle = &inst.saddle;
    diag.objective_gap = false;
    Trace trace = run(o, inst.problem, inst.gossip, inst.X0, inst.X0, stop, diag);
    return LogisticRun{std::move(inst), std::move(trace), seconds_since(start)};
  }();
  return result;
}

Verdict criterion3() {
  const LogisticRun& lr = logistic_run();
  const Trace& trace = lr.trace;
  double worst = 0.0;
  const bool descent = lyapunov_nonincreasing(trace, 1000, &worst);

  const double c1 = 0.9;
  double worst_a = 0.0;
  double worst_b = 0.0;
  bool sigma_ok = true;
  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    const TraceRecord& r = trace.records[i];
    if (r.k > 1000) break;
    if (r.L_k) {
      const double bound = curvature_bound(*r.L_k, *r.sigma, c1);
      worst_a = std::max(worst_a, *r.alpha_max - bound);
    }
    if (i + 1 < trace.records.size()) {
      const TraceRecord& n = trace.records[i + 1];
      const double cert = (2.0 + 2.0 * *r.gamma) * *r.alpha_max - 2.0 * *n.gamma * *n.alpha_max;
      worst_b = std::max(worst_b, -cert);
      if (*n.sigma < *r.sigma) sigma_ok = false;
    }
  }
  const bool certs = worst_a <= kCertificateTol && worst_b <= kCertificateTol && sigma_ok;
  return {descent && certs && !lr.inst.saddle.inexact,
          "worst relative V increase " + fmt(worst) + "; stepsize excess " + fmt(worst_a) +
              ", momentum certificate deficit " + fmt(worst_b) +
              (sigma_ok ? ", sigma nondecreasing" : ", sigma decreased")};
}

Verdict criterion4() {
  const LogisticRun& lr = logistic_run();
  double min_merit = 1e300;
  for (const TraceRecord& r : lr.trace.records) {
    if (r.merit_ergodic) min_merit = std::min(min_merit, *r.merit_ergodic);
    if (r.merit_last) min_merit = std::min(min_merit, *r.merit_last);
  }
  const RateFit fit = rate_fit(lr.trace, Metric::MeritErgodic, 100, 2000);
  const bool ok = fit.power_slope <= kPowerSlopeMax && fit.power_r2 >= kPowerR2Min &&
                  min_merit >= kMeritFloor && lr.seconds < 30.0;
  return {ok, "power slope " + fmt(fit.power_slope) + ", R^2 " + fmt(fit.power_r2) +
                  ", min merit " + fmt(min_merit) + ", " + fmt(lr.seconds) + " s"};
}

struct RidgeRuns {
  Instance inst;
  Trace global;
  Trace local;
  double global_seconds;
};

const RidgeRuns& ridge_runs() {
  static const RidgeRuns result = [] {
    Instance inst = adolf::testing::ridge20();
    StopRule stop;
    stop.max_iterations = kLinearBudget;
    stop.metric = Metric::DistanceSq;
    stop.threshold = kTailStop;
    RunDiagnostics diag;
    diag.saddle = &inst.saddle;
    diag.objective_gap = false;
    diag.merit = false;
    diag.lyapunov = false;

    AdolfOptions o;
    o.stepsize = StepsizeParams::strongly_convex_defaults();
    o.stepsize.c1 = 0.5;
    o.stepsize.c2 = 0.99;
    o.stepsize.sigma = InverseAlphaSqSigma{0.2};
    o.stepsize.growth = RatioPowerGrowth{10.0, 1.0};
    const auto start = Clock::now();
    Trace global = run(o, inst.problem, inst.gossip, inst.X0, inst.X0, stop, diag);
    const double secs = seconds_since(start);

    Trace local = run(AdolfLocalOptions{StepsizeParams::local_defaults(true)}, inst.problem,
                      inst.gossip, inst.X0, inst.X0, stop, diag);
    return RidgeRuns{std::move(inst), std::move(global), std::move(local), secs};
  }();
  return result;
}

double terminal(const Trace& t, Metric m) {
  for (auto it = t.records.rbegin(); it != t.records.rend(); ++it) {
    if (auto v = metric_value(*it, m)) return *v;
  }
  return INFINITY;
}

Verdict criterion5() {
  const RidgeRuns& rr = ridge_runs();
  const Trace& t = rr.global;
  const int last = t.records.back().k;
  const RateFit fit = rate_fit(t, Metric::DistanceSq, last / 2, last);
  const double dist = terminal(t, Metric::DistanceSq);
  const bool ok = t.status == RunStatus::Converged && dist <= kDistanceTarget &&
                  fit.geometric_r2 >= kGeometricR2Linear && rr.global_seconds < 60.0;
  return {ok, "distance " + fmt(dist) + " at k = " + std::to_string(last) + ", tail R^2 " +
                  fmt(fit.geometric_r2) + " (slope " + fmt(fit.geometric_slope) + "), " +
                  fmt(rr.global_seconds) + " s"};
}

struct LocalCheck {
  std::string name;
  std::optional<int> K;
  int last;
  double alpha_floor;
};

LocalCheck local_check(const std::string& name, const Trace& t) {
  LocalCheck c{name, t.consensus_iteration, t.records.empty() ? 0 : t.records.back().k, 1e300};
  for (const TraceRecord& r : t.records) {
    if (r.alpha_min) c.alpha_floor = std::min(c.alpha_floor, *r.alpha_min);
  }
  return c;
}

Trace local_run(const Instance& inst, bool strongly_convex, int iterations) {
  StopRule stop;
  stop.max_iterations = iterations;
  stop.metric = Metric::DistanceSq;
  stop.threshold = kLocalStop;
  RunDiagnostics diag;
  diag.saddle = &inst.saddle;
  diag.objective_gap = false;
  diag.merit = false;
  diag.lyapunov = false;
  return run(AdolfLocalOptions{StepsizeParams::local_defaults(strongly_convex)}, inst.problem,
             inst.gossip, inst.X0, inst.X0, stop, diag);
}

Verdict criterion6() {
  std::vector<LocalCheck> checks;
  const int budget = 3000;
  checks.push_back(local_check("ring_ridge", local_run(adolf::testing::ring_ridge(), true, budget)));
  checks.push_back(local_check("line_ridge", local_run(adolf::testing::line_ridge(), true, budget)));
  checks.push_back(local_check("logistic10", local_run(logistic_run().inst, false, budget)));
  checks.push_back(local_check("ridge20", ridge_runs().local));
  bool ok = true;
  std::string detail;
  for (const LocalCheck& c : checks) {
    const bool good = c.K && *c.K < kConsensusBound && *c.K < c.last && c.alpha_floor >= kLocalAlphaFloor;
    ok = ok && good;
    if (!detail.empty()) detail += "; ";
    detail += c.name + ": K = " + (c.K ? std::to_string(*c.K) : std::string("none")) + " of " +
              std::to_string(c.last) + ", min alpha " + fmt(c.alpha_floor);
  }
  return {ok, detail};
}

Verdict criterion7() {
  const RidgeRuns& rr = ridge_runs();
  const Trace& t = rr.local;
  const double dist = terminal(t, Metric::DistanceSq);
  const int last = t.records.back().k;
  if (!t.consensus_iteration) return {false, "no stepsize consensus observed"};
  const int K = *t.consensus_iteration;
  if (last - K < 3) return {false, "too few iterations after K = " + std::to_string(K)};
  const RateFit fit = rate_fit(t, Metric::DistanceSq, std::max(K, 1), last);
  const bool ok = dist <= kDistanceTarget && fit.geometric_r2 >= kGeometricR2Local;
  return {ok, "distance " + fmt(dist) + " at k = " + std::to_string(last) + ", K = " +
                  std::to_string(K) + ", R^2 after K " + fmt(fit.geometric_r2)};
}

ExperimentConfig baseline_config(const std::string& algorithm) {
  ExperimentConfig c;
  c.seed = 5;
  c.problem.kind = ProblemKind::Ridge;
  c.problem.agents = 20;
  c.problem.samples = 20;
  c.problem.dimension = 500;
  c.problem.seed = c.seed + kDataSeedOffset;
  c.graph.kind = GraphKind::ErdosRenyi;
  c.graph.agents = 20;
  c.graph.p = 0.9;
  c.graph.seed = c.seed + kGraphSeedOffset;
  c.init.seed = c.seed + kInitSeedOffset;
  c.stop.max_iter = 3000;
  c.stop.metric = Metric::DistanceSq;
  c.stop.threshold = kBaselineTarget;
  c.diagnostics.objective_gap = false;
  c.diagnostics.merit = false;
  c.diagnostics.lyapunov = false;
  c.algorithm.name = algorithm;
  c.output.name = algorithm;
  if (algorithm == "extra") {
    c.algorithm.mode = "fixed";
    c.algorithm.extra.grid = log_grid(1e-3, 1.0, 31);
  } else {
    c.algorithm.mode = "strongly_convex";
    c.algorithm.stepsize = StepsizeParams::strongly_convex_defaults();
  }
  return c;
}

Verdict criterion8() {
  const std::filesystem::path dir = std::filesystem::temp_directory_path() / "adolf_acceptance_c8";
  std::filesystem::remove_all(dir);
  Comparison cmp;
  compare_experiments({baseline_config("adolf"), baseline_config("extra")}, dir, "baseline", &cmp);
  const ComparisonRow& adolf = cmp.rows[0];
  const ComparisonRow& extra = cmp.rows[1];
  const bool tables = std::filesystem::exists(dir / "baseline_summary.csv") &&
                      std::filesystem::exists(dir / "baseline_long.csv");
  if (!adolf.comm_vector || !extra.comm_vector) {
    return {false, "threshold not reached: adolf " +
                       (adolf.comm_vector ? std::to_string(*adolf.comm_vector) : "budget") +
                       ", extra " + (extra.comm_vector ? std::to_string(*extra.comm_vector) : "budget")};
  }
  const bool ok = tables && static_cast<double>(*adolf.comm_vector) <=
                                kBaselineFactor * static_cast<double>(*extra.comm_vector);
  return {ok, "adolf " + std::to_string(*adolf.comm_vector) + " rounds, best EXTRA " +
                  std::to_string(*extra.comm_vector) + " rounds (alpha " + fmt(*extra.extra_alpha) +
                  ")" + (tables ? "" : ", comparison files missing")};
}

double fd_relative_error(const LocalObjective& f, const Vector& x) {
  const double h = 1e-5 * (1.0 + x.norm());
  const Vector g = f.gradient(x);
  Vector fd(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    Vector xp = x;
    Vector xm = x;
    xp(j) += h;
    xm(j) -= h;
    fd(j) = (f.value(xp) - f.value(xm)) / (2.0 * h);
  }
  return (g - fd).norm() / std::max(1.0, fd.norm());
}

Verdict criterion9() {
  const auto start = Clock::now();
  const ProblemInstance ridge = synth_ridge(3, 15, 6, 91);
  const ProblemInstance logistic = synth_logistic(3, 15, 6, 92, 0.1);
  Matrix q = initial_point(6, 6, 93);
  q = q * q.transpose() + Matrix::Identity(6, 6);
  const QuadraticObjective quad(q, initial_point(6, 1, 94).col(0));
  const std::vector<const LocalObjective*> objs = {&ridge.local(0), &ridge.local(2),
                                                   &logistic.local(0), &logistic.local(1), &quad};
  const Matrix points = initial_point(10, 6, 95);
  double worst = 0.0;
  for (const LocalObjective* f : objs) {
    for (int p = 0; p < 10; ++p) worst = std::max(worst, fd_relative_error(*f, points.row(p).transpose()));
  }
  const double t = seconds_since(start);
  return {worst <= kFiniteDifferenceTol && t < 1.0,
          "worst relative error " + fmt(worst) + " over 5 objectives x 10 points, " + fmt(t) + " s"};
}

Verdict criterion10() {
  double gossip_err = 0.0;
  bool pattern = true;
  double sqrt_err = 0.0;
  const std::vector<Graph> graphs = {make_line_graph(20), make_ring_graph(7),
                                     make_erdos_renyi(20, 0.1, 101), make_erdos_renyi(20, 0.9, 102)};
  for (const Graph& g : graphs) {
    const GossipMatrix mh = metropolis_hastings(g);
    const GossipMatrix w = psd_shift(mh, kDefaultShift);
    for (const Matrix* mat : {&mh.w_tilde(), &w.w()}) {
      const GossipCheck chk = check_gossip(g, *mat);
      gossip_err = std::max({gossip_err, chk.symmetry_error, chk.row_sum_error});
      pattern = pattern && chk.pattern_matches && chk.diagonal_positive;
    }
    const Matrix L = graph_laplacian_sqrt(w);
    sqrt_err = std::max(sqrt_err, (L * L - w.laplacian()).norm());
    sqrt_err = std::max(sqrt_err, (L * Vector::Ones(g.size())).norm());
  }

  double colsum = 0.0;
  double shadow = 0.0;
  double gamma_excess = -1.0;
  const auto scan = [&](const Trace& t, double c2) {
    for (const TraceRecord& r : t.records) {
      if (r.dual_column_sum) colsum = std::max(colsum, *r.dual_column_sum / (1.0 + *r.dual_norm));
      if (r.shadow_mismatch) shadow = std::max(shadow, *r.shadow_mismatch / (1.0 + *r.dual_norm));
      if (r.gamma) gamma_excess = std::max(gamma_excess, *r.gamma - gamma_ceiling(c2));
    }
  };
  scan(logistic_run().trace, 0.9);
  {
    const Instance inst = adolf::testing::ring_ridge();
    StopRule stop;
    stop.max_iterations = 1000;
    RunDiagnostics diag;
    diag.saddle = &inst.saddle;
    scan(run(AdolfLocalOptions{StepsizeParams::local_defaults(true)}, inst.problem, inst.gossip,
             inst.X0, inst.X0, stop, diag),
         0.99);
    AdolfOptions sc;
    sc.stepsize = StepsizeParams::strongly_convex_defaults();
    scan(run(sc, inst.problem, inst.gossip, inst.X0, inst.X0, stop, diag), 0.99);
  }
  const bool ok = gossip_err <= kGossipTol && pattern && sqrt_err <= kSqrtTol &&
                  colsum <= kColumnSumTol && shadow <= kShadowTol && gamma_excess <= 1e-12;
  return {ok, "gossip " + fmt(gossip_err) + (pattern ? "" : " (pattern mismatch)") +
                  ", sqrt " + fmt(sqrt_err) + ", dual column sum " + fmt(colsum) + ", shadow " +
                  fmt(shadow) + ", gamma over ceiling " + fmt(gamma_excess)};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Verdict criterion11() {
  const auto base = std::filesystem::temp_directory_path() / "adolf_acceptance_c11";
  std::filesystem::remove_all(base);
  std::vector<ExperimentConfig> configs;
  {
    ExperimentConfig c = baseline_config("adolf");
    c.problem.dimension = 50;
    c.stop.max_iter = 300;
    c.stop.metric.reset();
    c.diagnostics.merit = true;
    c.diagnostics.lyapunov = true;
    configs.push_back(c);
    c.algorithm.name = "adolf_local";
    c.algorithm.stepsize = StepsizeParams::local_defaults(true);
    c.output.name = "adolf_local";
    configs.push_back(c);
    c.problem.kind = ProblemKind::LogisticSynthetic;
    c.problem.noise = 0.1;
    c.algorithm.name = "adolf";
    c.algorithm.mode = "convex";
    c.algorithm.stepsize = StepsizeParams::convex_defaults();
    c.problem.dimension = 20;
    c.output.name = "adolf_logistic";
    configs.push_back(c);
  }
  bool ok = true;
  std::size_t bytes = 0;
  for (const ExperimentConfig& c : configs) {
    run_experiment(c, base / "a");
    run_experiment(c, base / "b");
    const std::string a = slurp(base / "a" / (c.output.name + ".csv"));
    const std::string b = slurp(base / "b" / (c.output.name + ".csv"));
    ok = ok && !a.empty() && a == b;
    bytes += a.size();
  }
  return {ok, std::to_string(configs.size()) + " configs run twice, " + std::to_string(bytes) +
                  " CSV bytes compared"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"1 constant-parameter ADOLF matches Condat-Vu", criterion1},
      {"2 Condat-Vu Lyapunov descent", criterion2},
      {"3 ADOLF Lyapunov descent and certificates", criterion3},
      {"4 ergodic merit sublinear rate", criterion4},
      {"5 strongly convex ADOLF linear rate", criterion5},
      {"6 local stepsize consensus", criterion6},
      {"7 ADOLF-local convergence", criterion7},
      {"8 ADOLF vs tuned EXTRA communications", criterion8},
      {"9 gradients vs finite differences", criterion9},
      {"10 structural invariants", criterion10},
      {"11 byte-identical CSV output", criterion11},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Verdict v{false, ""};
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] %s: %s\n", v.pass ? "PASS" : "FAIL", name.c_str(), v.detail.c_str());
    std::fflush(stdout);
    if (!v.pass) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
