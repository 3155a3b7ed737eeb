// adolf-sim: run, compare and validate decentralized optimization experiments.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "adolf/config.hpp"
#include "adolf/error.hpp"
#include "adolf/experiment.hpp"

namespace {

std::filesystem::path default_out_dir() {
  if (const char* env = std::getenv("ADOLF_OUT_DIR"); env != nullptr && *env != '\0') return env;
  return ".";
}

void print_manifest(const adolf::RunManifest& manifest) {
  for (const auto& e : manifest.entries) {
    std::cout << e.kind << ' ' << e.label << ' ' << e.status << ' ' << e.path << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive decentralized optimization simulator"};
  app.set_version_flag("--version", std::string(ADOLF_VERSION));
  app.require_subcommand(1);

  std::string run_config;
  std::string out_dir;
  auto* run_cmd = app.add_subcommand("run", "Run one experiment config");
  run_cmd->add_option("config", run_config, "Path to a JSON experiment config")->required();
  run_cmd->add_option("--out", out_dir, "Output directory (overrides $ADOLF_OUT_DIR)");

  std::vector<std::string> compare_configs;
  std::string compare_stem = "comparison";
  auto* compare_cmd = app.add_subcommand("compare", "Run several configs on one instance");
  compare_cmd->add_option("configs", compare_configs, "JSON experiment configs")->required();
  compare_cmd->add_option("--out", out_dir, "Output directory (overrides $ADOLF_OUT_DIR)");
  compare_cmd->add_option("--name", compare_stem, "Stem for the comparison files");

  std::string preset_name;
  adolf::PresetOptions preset;
  std::string images;
  std::string labels;
  bool emit_only = false;
  auto* preset_cmd = app.add_subcommand("preset", "Run a figure preset");
  preset_cmd->add_option("name", preset_name, "Preset name")
      ->required()
      ->check(CLI::IsMember(adolf::preset_names()));
  preset_cmd->add_option("--out", out_dir, "Output directory (overrides $ADOLF_OUT_DIR)");
  preset_cmd->add_flag("--synthetic-logistic", preset.synthetic_logistic,
                       "Use synthetic logistic data when MNIST is unavailable");
  preset_cmd->add_option("--mnist-images", images, "MNIST IDX image file");
  preset_cmd->add_option("--mnist-labels", labels, "MNIST IDX label file");
  preset_cmd->add_option("--seed", preset.seed, "Master seed");
  preset_cmd->add_flag("--emit-configs", emit_only, "Print the resolved configs and exit");

  std::string validate_config;
  auto* validate_cmd = app.add_subcommand("validate", "Parse a config and print it resolved");
  validate_cmd->add_option("config", validate_config, "Path to a JSON experiment config")
      ->required();

  CLI11_PARSE(app, argc, argv);

  const std::filesystem::path out =
      out_dir.empty() ? default_out_dir() : std::filesystem::path(out_dir);
  try {
    if (*run_cmd) {
      adolf::ExperimentConfig config = adolf::parse_config(run_config);
      if (!out_dir.empty()) config.output.dir = out_dir;
      const adolf::RunManifest manifest = adolf::run_experiment(config, out);
      print_manifest(manifest);
      return manifest.diverged ? adolf::exit_code(adolf::ErrorKind::Numeric) : 0;
    }
    if (*compare_cmd) {
      std::vector<adolf::ExperimentConfig> configs;
      for (const auto& path : compare_configs) configs.push_back(adolf::parse_config(path));
      adolf::Comparison cmp;
      const adolf::RunManifest manifest = adolf::compare_experiments(configs, out, compare_stem, &cmp);
      std::cout << adolf::format_summary(cmp);
      print_manifest(manifest);
      return manifest.diverged ? adolf::exit_code(adolf::ErrorKind::Numeric) : 0;
    }
    if (*preset_cmd) {
      if (!images.empty()) preset.images_path = images;
      if (!labels.empty()) preset.labels_path = labels;
      const auto configs = adolf::figure_preset(preset_name, preset);
      if (emit_only) {
        for (const auto& c : configs) std::cout << adolf::emit_config(c);
        return 0;
      }
      adolf::Comparison cmp;
      const adolf::RunManifest manifest =
          adolf::compare_experiments(configs, out / preset_name, preset_name, &cmp);
      std::cout << adolf::format_summary(cmp);
      print_manifest(manifest);
      return manifest.diverged ? adolf::exit_code(adolf::ErrorKind::Numeric) : 0;
    }
    if (*validate_cmd) {
      std::cout << adolf::emit_config(adolf::parse_config(validate_config));
      return 0;
    }
  } catch (const adolf::Error& e) {
    std::cerr << "adolf-sim: " << adolf::to_string(e.kind()) << " error: " << e.what() << '\n';
    return adolf::exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "adolf-sim: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
