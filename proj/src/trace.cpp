#include "adolf/trace.hpp"

#include <cstdio>
#include <ostream>

namespace adolf {

const char* to_string(RunStatus status) {
  switch (status) {
    case RunStatus::Converged: return "converged";
    case RunStatus::Budget: return "budget";
    case RunStatus::Diverged: return "diverged";
  }
  return "unknown";
}

const std::vector<std::string>& csv_header() {
  static const std::vector<std::string> header = {
      "k",         "comm_vector", "comm_scalar", "objective_gap", "distance_sq", "consensus_err",
      "merit_ergodic", "lyapunov", "alpha_min",  "alpha_max",     "gamma",       "L_k"};
  return header;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

void put(std::ostream& os, const std::optional<double>& v) {
  os << ',';
  if (v) os << format_double(*v);
}

}  // namespace

void write_csv(std::ostream& os, const Trace& trace) {
  const auto& header = csv_header();
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << '\n';
  for (const auto& r : trace.records) {
    os << r.k << ',' << r.comm_vector << ',' << r.comm_scalar;
    put(os, r.objective_gap);
    put(os, r.distance_sq);
    put(os, r.consensus_err);
    put(os, r.merit_ergodic);
    put(os, r.lyapunov);
    put(os, r.alpha_min);
    put(os, r.alpha_max);
    put(os, r.gamma);
    put(os, r.L_k);
    os << '\n';
  }
}

std::optional<Metric> parse_metric(const std::string& name) {
  if (name == "objective_gap") return Metric::ObjectiveGap;
  if (name == "distance_sq") return Metric::DistanceSq;
  if (name == "consensus_err") return Metric::ConsensusErr;
  if (name == "merit_ergodic") return Metric::MeritErgodic;
  if (name == "lyapunov") return Metric::Lyapunov;
  return std::nullopt;
}

const char* to_string(Metric metric) {
  switch (metric) {
    case Metric::ObjectiveGap: return "objective_gap";
    case Metric::DistanceSq: return "distance_sq";
    case Metric::ConsensusErr: return "consensus_err";
    case Metric::MeritErgodic: return "merit_ergodic";
    case Metric::Lyapunov: return "lyapunov";
  }
  return "unknown";
}

std::optional<double> metric_value(const TraceRecord& r, Metric metric) {
  switch (metric) {
    case Metric::ObjectiveGap: return r.objective_gap;
    case Metric::DistanceSq: return r.distance_sq;
    case Metric::ConsensusErr: return r.consensus_err;
    case Metric::MeritErgodic: return r.merit_ergodic;
    case Metric::Lyapunov: return r.lyapunov;
  }
  return std::nullopt;
}

RateFit rate_fit(const Trace& trace, Metric metric, int first, int last) {
  std::vector<double> ks;
  std::vector<double> values;
  for (const auto& r : trace.records) {
    if (r.k < first || r.k > last) continue;
    const auto v = metric_value(r, metric);
    if (!v) continue;
    ks.push_back(static_cast<double>(r.k));
    values.push_back(*v);
  }
  return rate_fit(std::span<const double>(ks), std::span<const double>(values));
}

}  // namespace adolf
