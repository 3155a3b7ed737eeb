#include "adolf/run.hpp"

#include <cmath>
#include <random>

#include "adolf/error.hpp"

namespace adolf {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool needs_saddle(Metric metric) {
  return metric != Metric::ConsensusErr;
}

}  // namespace

const char* algorithm_name(const AlgorithmSpec& spec) {
  return std::visit(overloaded{
                        [](const AdolfOptions&) { return "adolf"; },
                        [](const AdolfLocalOptions&) { return "adolf_local"; },
                        [](const CondatVuOptions&) { return "condat_vu"; },
                        [](const ExtraOptions&) { return "extra"; },
                    },
                    spec);
}

std::unique_ptr<Method> make_method(const AlgorithmSpec& spec, const ProblemInstance& problem,
                                    const GossipMatrix& gossip, const Matrix& X_minus1,
                                    const Matrix& X0) {
  return std::visit(
      overloaded{
          [&](const AdolfOptions& o) { return make_adolf(problem, gossip, X_minus1, X0, o); },
          [&](const AdolfLocalOptions& o) {
            return make_adolf_local(problem, gossip, X_minus1, X0, o);
          },
          [&](const CondatVuOptions& o) {
            return make_condat_vu(problem, gossip, X_minus1, X0, o);
          },
          [&](const ExtraOptions& o) { return make_extra(problem, gossip, X0, o); },
      },
      spec);
}

Trace run(Method& method, const ProblemInstance& problem, const GossipMatrix& gossip,
          const StopRule& stop, const RunDiagnostics& diag) {
  if (stop.max_iterations < 0) throw config_error("max_iter must be nonnegative");
  if (stop.cadence < 1) throw config_error("diagnostics cadence must be at least 1");
  if (diag.ergodic_start < 0) throw config_error("ergodic start must be nonnegative");
  if (stop.metric && needs_saddle(*stop.metric) && diag.saddle == nullptr) {
    throw config_error(std::string("stop metric '") + to_string(*stop.metric) +
                       "' needs a reference saddle point");
  }
  const SaddlePoint* saddle = diag.saddle;
  const int m = problem.agents();
  const int d = problem.dimension();

  Trace trace;
  trace.algorithm = method.name();

  const bool has_dual = method.dual() != nullptr;
  const bool track_shadow = has_dual && (diag.lyapunov || diag.invariants);
  Matrix L_op;
  Matrix Y;
  if (track_shadow) {
    L_op = graph_laplacian_sqrt(gossip);
    Y = Matrix::Zero(m, d);
  }
  ErgodicAccumulator ergodic(m, d, diag.ergodic_start);
  RestrictedConstants restricted;
  std::optional<int> equal_since;

  for (;;) {
    const int k = method.iteration();
    const bool record = k % stop.cadence == 0 || k == stop.max_iterations;

    TraceRecord row;
    row.k = k;
    row.comm_vector = method.comm_vector();
    row.comm_scalar = method.comm_scalar();
    Matrix X_prev_copy;
    if (record) {
      const Matrix& X = method.current();
      row.consensus_err = consensus_error(gossip, X);
      if (saddle) {
        row.distance_sq = (X - saddle->X_star).squaredNorm();
        if (diag.objective_gap) row.objective_gap = objective_gap(problem, X, *saddle);
        if (diag.merit) {
          row.primal_gap = primal_gap(problem, X, *saddle);
          row.merit_last = *row.primal_gap + *row.consensus_err;
          if (!ergodic.empty()) row.merit_ergodic = merit(problem, gossip, ergodic.average(), *saddle);
        }
        if (diag.lyapunov && has_dual) X_prev_copy = method.previous();
      }
      if (has_dual && diag.invariants) {
        const Matrix& D = *method.dual();
        row.dual_column_sum = D.colwise().sum().cwiseAbs().maxCoeff();
        row.dual_norm = D.norm();
        row.shadow_mismatch = (L_op * Y - D).norm();
      }
    }
    const Matrix X_now_copy = (saddle && diag.merit) ? method.current() : Matrix();

    StepReport report;
    try {
      report = method.advance();
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Numeric) throw;
      trace.status = RunStatus::Diverged;
      trace.divergence_reason = e.what();
      if (record) trace.records.push_back(std::move(row));
      trace.iterations = k;
      break;
    }

    row.alpha_min = report.alpha_min;
    row.alpha_max = report.alpha_max;
    row.gamma = report.gamma_max;
    row.gamma_min = report.gamma_min;
    row.L_k = report.curvature;
    row.sigma = report.sigma;
    row.decrease_events = report.decrease_events;
    if (report.curvature && report.secant_mu) {
      restricted.observe_secant(*report.curvature, *report.secant_mu);
    }

    if (record && saddle && diag.lyapunov && has_dual && report.sigma &&
        report.alpha_min == report.alpha_max && report.gamma_min == report.gamma_max) {
      row.lyapunov = lyapunov(problem,
                              {X_now_copy, X_prev_copy, Y, *report.sigma, report.gamma_max,
                               report.alpha_max},
                              *saddle);
    }

    if (saddle && diag.merit && k >= diag.ergodic_start) {
      ergodic.update(X_now_copy, report.gamma_mean);
    }
    if (track_shadow && report.dual_argument.size() > 0) {
      Y.noalias() += L_op * report.dual_argument;
    }

    if (report.alpha_min == report.alpha_max && report.gamma_min == report.gamma_max) {
      if (!equal_since) equal_since = k;
    } else {
      equal_since.reset();
    }

    const bool stop_hit = record && stop.metric && [&] {
      const auto v = metric_value(row, *stop.metric);
      return v && *v <= stop.threshold;
    }();
    if (record) trace.records.push_back(std::move(row));
    trace.iterations = k;

    const Matrix& X_next = method.current();
    if (!X_next.allFinite() || X_next.norm() > kDivergenceNorm) {
      trace.status = RunStatus::Diverged;
      trace.divergence_reason = "iterate norm exceeded " + format_double(kDivergenceNorm);
      break;
    }
    if (stop_hit) {
      trace.status = RunStatus::Converged;
      break;
    }
    if (k >= stop.max_iterations) {
      trace.status = RunStatus::Budget;
      break;
    }
  }

  trace.consensus_iteration = equal_since;
  trace.L_tilde_hat = restricted.L_tilde_hat();
  trace.mu_tilde_hat = restricted.mu_tilde_hat();
  return trace;
}

Trace run(const AlgorithmSpec& spec, const ProblemInstance& problem, const GossipMatrix& gossip,
          const Matrix& X_minus1, const Matrix& X0, const StopRule& stop,
          const RunDiagnostics& diagnostics) {
  auto method = make_method(spec, problem, gossip, X_minus1, X0);
  return run(*method, problem, gossip, stop, diagnostics);
}

Matrix initial_point(int m, int d, std::optional<std::uint64_t> seed) {
  if (m < 1 || d < 1) throw invalid_argument("initial point needs m >= 1 and d >= 1");
  if (!seed) return Matrix::Zero(m, d);
  std::mt19937_64 rng(*seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix X(m, d);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < d; ++j) X(i, j) = normal(rng);
  }
  return X;
}

std::vector<double> log_grid(double lo, double hi, int n) {
  if (!(lo > 0.0 && hi >= lo) || n < 1) throw invalid_argument("log_grid needs 0 < lo <= hi, n >= 1");
  std::vector<double> out;
  if (n == 1) return {lo};
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (int i = 0; i < n; ++i) out.push_back(std::exp(a + (b - a) * i / (n - 1)));
  return out;
}

GridSearchResult extra_grid_search(const ProblemInstance& problem, const GossipMatrix& gossip,
                                   const Matrix& X0, const std::vector<double>& grid,
                                   const StopRule& stop, const RunDiagnostics& diagnostics) {
  if (grid.empty()) throw config_error("EXTRA grid is empty");
  if (!stop.metric) throw config_error("EXTRA grid search needs a stop metric to rank runs");

  GridSearchResult result;
  std::optional<std::size_t> best;
  auto better = [&](const GridPoint& a, const GridPoint& b) {
    // Does a beat b?
    const bool ca = a.status == RunStatus::Converged;
    const bool cb = b.status == RunStatus::Converged;
    if (ca != cb) return ca;
    if (ca) {
      if (*a.iterations != *b.iterations) return *a.iterations < *b.iterations;
      return a.alpha > b.alpha;
    }
    const bool da = a.status == RunStatus::Diverged || !a.terminal_metric;
    const bool db = b.status == RunStatus::Diverged || !b.terminal_metric;
    if (da != db) return !da;
    if (da) return false;
    if (*a.terminal_metric != *b.terminal_metric) return *a.terminal_metric < *b.terminal_metric;
    return a.alpha > b.alpha;
  };

  std::vector<Trace> traces;
  for (double alpha : grid) {
    Trace t = run(ExtraOptions{alpha}, problem, gossip, X0, X0, stop, diagnostics);
    GridPoint p;
    p.alpha = alpha;
    p.status = t.status;
    if (!t.records.empty()) {
      const TraceRecord& last = t.records.back();
      p.comm_vector = last.comm_vector;
      if (t.status != RunStatus::Diverged) p.terminal_metric = metric_value(last, *stop.metric);
      if (t.status == RunStatus::Converged) p.iterations = last.k;
    }
    result.points.push_back(p);
    traces.push_back(std::move(t));
    const std::size_t idx = result.points.size() - 1;
    if (!best || better(result.points[idx], result.points[*best])) best = idx;
  }
  const GridPoint& winner = result.points[*best];
  if (winner.status == RunStatus::Diverged || !winner.terminal_metric ||
      !std::isfinite(*winner.terminal_metric)) {
    throw Error(ErrorKind::NoConvergentStepsize,
                "every EXTRA stepsize in the grid diverged or produced no usable metric");
  }
  result.best_alpha = winner.alpha;
  result.best_trace = std::move(traces[*best]);
  return result;
}

}  // namespace adolf
