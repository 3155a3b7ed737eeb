#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "adolf/config.hpp"

namespace adolf {

/// Everything a run needs, built from a config.
struct Setup {
  GossipMatrix gossip;
  ProblemInstance problem;
  std::optional<SaddlePoint> saddle;
  Matrix X0;
};

Graph build_graph(const GraphSpec& spec);
ProblemInstance build_problem(const ProblemSpec& spec);
/// Builds graph, gossip, problem, initial point and (if requested) the saddle.
/// A saddle whose centralized solve stops early is kept and marked inexact.
Setup build_setup(const ExperimentConfig& config);

AlgorithmSpec algorithm_spec(const AlgorithmConfig& algorithm);
StopRule stop_rule(const ExperimentConfig& config);

struct Outcome {
  Trace trace;
  std::optional<GridSearchResult> grid;  // EXTRA without a fixed alpha
  bool saddle_inexact = false;
};

/// Runs the configured algorithm in memory.
Outcome execute(const ExperimentConfig& config, const Setup& setup);
Outcome execute(const ExperimentConfig& config);

struct ManifestEntry {
  std::string label;
  std::string algorithm;
  std::string kind;  // trace | grid | comparison
  std::string path;
  std::string status;
  int iterations = 0;
  std::optional<int> consensus_iteration;
  std::optional<double> extra_alpha;
  bool saddle_inexact = false;
};

struct RunManifest {
  std::string version;
  std::string started;
  std::string finished;
  std::vector<std::string> config_echo;
  std::vector<ManifestEntry> entries;
  bool diverged = false;
};

/// Resolves the output directory: config value, else the fallback.
std::filesystem::path output_dir(const ExperimentConfig& config,
                                 const std::filesystem::path& fallback);

/// Writes <name>.csv (plus <name>_grid.csv for EXTRA grid search) and
/// <name>.manifest.json into the output directory.
RunManifest run_experiment(const ExperimentConfig& config, const std::filesystem::path& fallback_dir);

struct ComparisonRow {
  std::string label;
  std::string algorithm;
  RunStatus status = RunStatus::Budget;
  std::optional<long> comm_vector;  // to threshold; empty when not reached
  std::optional<long> comm_scalar;
  std::optional<int> iterations;
  std::optional<double> final_metric;
  std::optional<double> extra_alpha;
};

struct Comparison {
  Metric metric = Metric::DistanceSq;
  double threshold = 0.0;
  std::vector<ComparisonRow> rows;
  std::vector<Trace> traces;
};

/// Runs every config on the shared instance. Configs must agree on problem,
/// graph, gossip shift and initial point; otherwise ComparisonInvalid.
Comparison compare(const std::vector<ExperimentConfig>& configs);

/// algorithm,k,comm_vector,comm_scalar,<metric>
void write_long_csv(std::ostream& os, const Comparison& comparison);
/// One gnuplot data block per algorithm (select with `index`).
void write_gnuplot(std::ostream& os, const Comparison& comparison);
void write_summary_csv(std::ostream& os, const Comparison& comparison);
/// Fixed-width table for terminals; unreached thresholds print as "budget".
std::string format_summary(const Comparison& comparison);

/// Runs compare and writes per-run traces, <stem>_long.csv, <stem>.dat,
/// <stem>_summary.csv and <stem>.manifest.json.
RunManifest compare_experiments(const std::vector<ExperimentConfig>& configs,
                                const std::filesystem::path& dir, const std::string& stem,
                                Comparison* out = nullptr);

struct PresetOptions {
  std::optional<std::string> images_path;
  std::optional<std::string> labels_path;
  bool synthetic_logistic = false;
  std::uint64_t seed = 1;
};

const std::vector<std::string>& preset_names();
std::vector<ExperimentConfig> figure_preset(const std::string& name, const PresetOptions& options);

/// Writes text to path through a temporary file and a rename.
void write_atomically(const std::filesystem::path& path, const std::string& contents);

std::string manifest_json(const RunManifest& manifest);

}  // namespace adolf
