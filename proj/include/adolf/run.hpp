#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "adolf/diagnostics.hpp"
#include "adolf/solvers.hpp"
#include "adolf/trace.hpp"

namespace adolf {

using AlgorithmSpec = std::variant<AdolfOptions, AdolfLocalOptions, CondatVuOptions, ExtraOptions>;

const char* algorithm_name(const AlgorithmSpec& spec);

struct StopRule {
  int max_iterations = 1000;
  std::optional<Metric> metric;  // stop once this metric is <= threshold
  double threshold = 0.0;
  int cadence = 1;               // record every cadence-th iteration (and the last)
};

/// Which per-row diagnostics to compute. Everything that needs X* is skipped
/// when no saddle point is supplied.
struct RunDiagnostics {
  const SaddlePoint* saddle = nullptr;
  bool objective_gap = true;
  bool merit = true;      // ergodic and last-iterate merit
  bool lyapunov = true;   // also integrates the shadow dual Y
  bool invariants = true; // dual column sums and the shadow mismatch
  int ergodic_start = 0;
};

/// Iterates past this Frobenius norm count as diverged.
inline constexpr double kDivergenceNorm = 1e12;

std::unique_ptr<Method> make_method(const AlgorithmSpec& spec, const ProblemInstance& problem,
                                    const GossipMatrix& gossip, const Matrix& X_minus1,
                                    const Matrix& X0);

/// Runs until the budget, the stop threshold or divergence. Row k describes X^k
/// and the step taken from it; max_iterations = N yields rows 0..N.
Trace run(Method& method, const ProblemInstance& problem, const GossipMatrix& gossip,
          const StopRule& stop, const RunDiagnostics& diagnostics = {});

Trace run(const AlgorithmSpec& spec, const ProblemInstance& problem, const GossipMatrix& gossip,
          const Matrix& X_minus1, const Matrix& X0, const StopRule& stop,
          const RunDiagnostics& diagnostics = {});

/// Rows drawn i.i.d. standard normal (seeded), or all zeros when seed is empty.
Matrix initial_point(int m, int d, std::optional<std::uint64_t> seed);

/// n points spaced evenly in log scale over [lo, hi].
std::vector<double> log_grid(double lo, double hi, int n);

struct GridPoint {
  double alpha = 0.0;
  RunStatus status = RunStatus::Budget;
  std::optional<int> iterations;  // first recorded k meeting the threshold
  long comm_vector = 0;
  std::optional<double> terminal_metric;
};

struct GridSearchResult {
  double best_alpha = 0.0;
  Trace best_trace;
  std::vector<GridPoint> points;
};

/// Tunes the EXTRA stepsize over the grid. Runs that reach the threshold rank
/// by iteration count, ties going to the larger alpha; otherwise the smallest
/// terminal metric wins. Throws NoConvergentStepsize when every run diverges.
GridSearchResult extra_grid_search(const ProblemInstance& problem, const GossipMatrix& gossip,
                                   const Matrix& X0, const std::vector<double>& grid,
                                   const StopRule& stop, const RunDiagnostics& diagnostics = {});

}  // namespace adolf
