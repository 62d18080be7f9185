#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <string>

#include "drbench/config.hpp"
#include "drbench/errors.hpp"
#include "drbench/experiment.hpp"

namespace {

int cmd_run(const std::string& config_path, const std::string& out_override,
            long long seed_override, int jobs_override) {
  drbench::ExperimentConfig cfg = drbench::load_experiment_config(config_path);
  if (!out_override.empty()) cfg.output_dir = out_override;
  if (seed_override >= 0) cfg.master_seed = static_cast<std::uint64_t>(seed_override);
  if (jobs_override >= 0) cfg.jobs = jobs_override;

  auto findings = drbench::validate_config(cfg);
  if (!findings.empty()) {
    for (const std::string& f : findings) std::fprintf(stderr, "config: %s\n", f.c_str());
    return 1;
  }

  drbench::RunResult result = drbench::run_experiment(cfg);
  std::printf("wrote %s\n", result.accuracy_csv.string().c_str());
  std::printf("wrote %s\n", result.robustness_csv.string().c_str());
  std::printf("wrote %s\n", result.manifest_path.string().c_str());
  std::printf("rows: %d, error rows: %d\n", result.cells_total, result.cells_failed);
  return result.cells_failed == 0 ? 0 : 3;
}

int cmd_gallery(const std::string& config_path, const std::string& out_override,
                const std::string& cell_text, int count) {
  drbench::ExperimentConfig cfg = drbench::load_experiment_config(config_path);
  if (!out_override.empty()) cfg.output_dir = out_override;
  drbench::CellKey cell = drbench::parse_cell_key(cell_text);
  drbench::emit_reconstruction_gallery(cfg, cell, count);
  std::printf("gallery written under %s/gallery\n", cfg.output_dir.c_str());
  return 0;
}

int cmd_validate(const std::string& config_path) {
  drbench::ExperimentConfig cfg = drbench::load_experiment_config(config_path);
  auto findings = drbench::validate_config(cfg);
  if (findings.empty()) {
    std::printf("config ok (digest %s)\n",
                drbench::config_digest(cfg.raw_text).c_str());
    return 0;
  }
  for (const std::string& f : findings) std::printf("finding: %s\n", f.c_str());
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"benchmark harness for reconstruction attacks on linear dimensionality reduction"};
  app.require_subcommand(1);

  std::string config_path, out_dir, cell_text;
  long long seed_override = -1;
  int jobs_override = -1;
  int gallery_count = 8;

  CLI::App* run = app.add_subcommand("run", "run the full sweep from a config file");
  run->add_option("--config", config_path, "config file")->required();
  run->add_option("--out", out_dir, "output directory (overrides the config)");
  run->add_option("--seed", seed_override, "master seed override");
  run->add_option("--jobs", jobs_override, "worker threads (0 = hardware)");

  CLI::App* gallery = app.add_subcommand("gallery", "dump original/reconstructed image pairs for one cell");
  gallery->add_option("--config", config_path, "config file")->required();
  gallery->add_option("--out", out_dir, "output directory (overrides the config)");
  gallery->add_option("--cell", cell_text, "cell as method,k,attack")->required();
  gallery->add_option("--count", gallery_count, "number of image pairs");

  CLI::App* validate = app.add_subcommand("validate", "check a config without running it");
  validate->add_option("--config", config_path, "config file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, out_dir, seed_override, jobs_override);
    if (gallery->parsed()) return cmd_gallery(config_path, out_dir, cell_text, gallery_count);
    if (validate->parsed()) return cmd_validate(config_path);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
