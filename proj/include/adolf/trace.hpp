#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "adolf/diagnostics.hpp"

namespace adolf {

/// One row per recorded iteration k, describing the iterate X^k and the
/// stepsize chosen to move away from it.
struct TraceRecord {
  int k = 0;
  long comm_vector = 0;
  long comm_scalar = 0;
  std::optional<double> objective_gap;
  std::optional<double> distance_sq;
  std::optional<double> consensus_err;
  std::optional<double> merit_ergodic;
  std::optional<double> lyapunov;
  std::optional<double> alpha_min;
  std::optional<double> alpha_max;
  std::optional<double> gamma;  // max over agents in local mode
  std::optional<double> L_k;

  // Not part of the CSV schema.
  std::optional<double> merit_last;
  std::optional<double> primal_gap;
  std::optional<double> sigma;      // sigma^k (min over agents in local mode)
  std::optional<double> gamma_min;
  std::optional<double> dual_column_sum;   // max |1^T D^k| over columns
  std::optional<double> dual_norm;
  std::optional<double> shadow_mismatch;   // ||Ł Y^k - D^k||
  int decrease_events = 0;                 // local mode, this iteration
};

enum class RunStatus { Converged, Budget, Diverged };

const char* to_string(RunStatus status);

struct Trace {
  std::string algorithm;
  std::vector<TraceRecord> records;
  RunStatus status = RunStatus::Budget;
  std::string divergence_reason;
  /// Local mode: first iteration from which all agents share one stepsize.
  std::optional<int> consensus_iteration;
  std::optional<double> L_tilde_hat;
  std::optional<double> mu_tilde_hat;
  int iterations = 0;
};

/// Column names of the CSV schema, in order.
const std::vector<std::string>& csv_header();

void write_csv(std::ostream& os, const Trace& trace);

/// Formats a double so that it round-trips and prints identically across runs.
std::string format_double(double v);

enum class Metric { ObjectiveGap, DistanceSq, ConsensusErr, MeritErgodic, Lyapunov };

std::optional<Metric> parse_metric(const std::string& name);
const char* to_string(Metric metric);
std::optional<double> metric_value(const TraceRecord& record, Metric metric);

/// Fits the chosen metric over records with first <= k <= last.
RateFit rate_fit(const Trace& trace, Metric metric, int first, int last);

}  // namespace adolf
