#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "drbench/classify.hpp"
#include "drbench/config.hpp"
#include "drbench/dataset.hpp"
#include "drbench/reduction.hpp"

namespace drbench {

struct RunManifest {
  std::string version;
  std::string config_digest;
  std::string created_utc;  // timestamps live here, never in the CSVs
  std::vector<std::pair<std::string, std::string>> entries;
};

struct RunResult {
  RunManifest manifest;
  int cells_total = 0;    // rows across both CSVs
  int cells_failed = 0;   // rows with an error status
  std::filesystem::path accuracy_csv;
  std::filesystem::path robustness_csv;
  std::filesystem::path manifest_path;
};

// Everything loaded/trained once per run: the split datasets, the attacker
// bindings, the ARR reference classifier and the cached PCA basis.
struct ExperimentContext {
  LabeledDataset train;
  LabeledDataset test;
  std::optional<LabeledDataset> sub;
  std::map<std::string, LabeledDataset> attackers;  // binding -> dataset
  Classifier theta;
  double theta_accuracy = 0.0;
  std::optional<PcaBasis> pca;
};

ExperimentContext build_context(const ExperimentConfig& cfg);

// Runs the full sweep (methods x K grid x attacks x classifiers), writing
// accuracy.csv, robustness.csv, manifest.txt and the per-cell galleries to
// cfg.output_dir. Cell failures become error rows; the run continues.
RunResult run_experiment(const ExperimentConfig& cfg);

struct CellKey {
  std::string method;
  int k = 0;
  std::string attack;
};

// Parses "method,k,attack".
CellKey parse_cell_key(const std::string& text);

// Writes `count` original/reconstruction pairs for one cell plus a sidecar
// with the cell's MSE and ARR. The cell must exist in the config's grid.
void emit_reconstruction_gallery(const ExperimentConfig& cfg, const CellKey& cell,
                                 int count);

// Decimal formatting used for every CSV value: 9 significant digits.
std::string format_sig9(double v);

// Content hash of the raw config text (fnv1a64, hex).
std::string config_digest(const std::string& raw_text);

}  // namespace drbench
