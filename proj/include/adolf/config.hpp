#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "adolf/run.hpp"

namespace adolf {

enum class ProblemKind { Ridge, LogisticSynthetic, Mnist };
enum class GraphKind { Line, Ring, Complete, ErdosRenyi };

struct ProblemSpec {
  ProblemKind kind = ProblemKind::Ridge;
  int agents = 20;
  int samples = 20;
  int dimension = 50;
  double noise = 0.1;  // logistic label-flip probability
  std::string images_path;
  std::string labels_path;
  std::pair<int, int> digits{0, 1};  // (negative, positive)
  std::uint64_t seed = 0;
  bool operator==(const ProblemSpec&) const = default;
};

struct GraphSpec {
  GraphKind kind = GraphKind::Line;
  int agents = 20;
  double p = 0.5;
  std::uint64_t seed = 0;
  bool operator==(const GraphSpec&) const = default;
};

struct ExtraSpec {
  std::optional<double> alpha;  // fixed stepsize; otherwise the grid is searched
  std::vector<double> grid;
  bool operator==(const ExtraSpec&) const = default;
};

struct AlgorithmConfig {
  std::string name = "adolf";  // adolf | adolf_local | extra | condat_vu
  std::string mode = "convex"; // adolf: convex | strongly_convex | fixed
  StepsizeParams stepsize = StepsizeParams::convex_defaults();
  FixedParameters fixed;
  ExtraSpec extra;
  bool operator==(const AlgorithmConfig&) const = default;
};

struct InitSpec {
  bool gaussian = true;
  std::uint64_t seed = 0;
  bool operator==(const InitSpec&) const = default;
};

struct StopSpec {
  int max_iter = 1000;
  std::optional<Metric> metric;
  double threshold = 0.0;
  bool operator==(const StopSpec&) const = default;
};

struct DiagnosticsSpec {
  int every = 1;
  bool saddle = true;
  double saddle_tol = 1e-10;
  int saddle_max_iter = 200000;
  bool objective_gap = true;
  bool merit = true;
  bool lyapunov = true;
  bool operator==(const DiagnosticsSpec&) const = default;
};

struct OutputSpec {
  std::string dir;   // empty: decided by the caller
  std::string name;  // file stem; defaults to the algorithm name
  bool operator==(const OutputSpec&) const = default;
};

struct ExperimentConfig {
  std::uint64_t seed = 1;
  ProblemSpec problem;
  GraphSpec graph;
  double c = kDefaultShift;
  AlgorithmConfig algorithm;
  InitSpec init;
  StopSpec stop;
  DiagnosticsSpec diagnostics;
  OutputSpec output;
  bool operator==(const ExperimentConfig&) const = default;
};

/// Component seeds are the master seed plus these offsets unless given.
inline constexpr std::uint64_t kGraphSeedOffset = 1;
inline constexpr std::uint64_t kDataSeedOffset = 2;
inline constexpr std::uint64_t kInitSeedOffset = 3;

/// Parses a JSON document, fills defaults and validates. Errors name the key.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config(const std::string& path);

/// Fully resolved JSON; parse_config_text(emit_config(c)) == c.
std::string emit_config(const ExperimentConfig& config);

/// Cross-field checks; throws a config error.
void validate(const ExperimentConfig& config);

/// Default EXTRA grid: 20 log-spaced points in [1e-5, 10].
std::vector<double> default_extra_grid();

const char* to_string(ProblemKind kind);
const char* to_string(GraphKind kind);

}  // namespace adolf
