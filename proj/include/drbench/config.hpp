#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "drbench/classify.hpp"

namespace drbench {

// Structured key-value config text: `[section.table]` headers and
// `key = value` lines, where value is a quoted string, integer, float,
// boolean, or a homogeneous [a, b, c] array of strings or integers.
// '#' starts a comment. Keys are exposed flat as "section.key".
using ConfigValue = std::variant<std::string, std::int64_t, double, bool,
                                 std::vector<std::string>,
                                 std::vector<std::int64_t>>;

class ConfigTable {
 public:
  static ConfigTable parse_file(const std::filesystem::path& path);
  static ConfigTable parse_text(const std::string& text,
                                const std::string& origin = "<inline>");

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& dflt) const;
  std::int64_t get_int(const std::string& key, std::int64_t dflt) const;
  double get_double(const std::string& key, double dflt) const;
  bool get_bool(const std::string& key, bool dflt) const;
  std::vector<std::string> get_string_list(const std::string& key) const;
  std::vector<std::int64_t> get_int_list(const std::string& key) const;

  const std::string& text() const { return text_; }

 private:
  std::map<std::string, ConfigValue> values_;
  std::string text_;
  std::string origin_;

  [[noreturn]] void type_error(const std::string& key, const char* want) const;
};

struct DataSourceConfig {
  std::string source = "synthetic";  // synthetic | image_dir | cifar_batches | cache
  std::string path;
  int image_size = 28;
  int classes = 38;
  int per_class = 64;
  double snr = 4.0;
  std::uint64_t seed = 7;
};

struct ExperimentConfig {
  DataSourceConfig data;
  int classes_per_side = 19;
  double train_fraction = 0.75;

  DataSourceConfig attacker_external;
  int attacker_row_cap = 20000;

  std::vector<std::string> methods;
  std::vector<int> k_grid;
  std::vector<std::string> attacks;      // "pinv" | "regression:<binding>"
  std::vector<std::string> classifiers;  // utility classifiers
  std::uint64_t master_seed = 1;
  std::string output_dir = "out";
  int jobs = 0;  // 0 = hardware concurrency
  int gallery_count = 4;
  bool save_matrices = false;

  bool center = false;
  bool clip_reconstruction = false;
  bool regression_intercept = false;
  std::string rp_variance_mode = "standard";  // standard | paper_literal

  TrainConfig svm_config;
  TrainConfig forest_config;
  TrainConfig logreg_config;

  std::string raw_text;  // exact config text, hashed into the manifest

  int feature_dim() const { return data.image_size * data.image_size; }
};

// Parses and applies DRBENCH_OUT / DRBENCH_JOBS environment overrides.
// Throws ConfigError on syntax errors; semantic problems are reported by
// validate_config instead.
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
ExperimentConfig experiment_config_from_table(const ConfigTable& table);

// All semantic findings, empty when the config is runnable.
std::vector<std::string> validate_config(const ExperimentConfig& cfg);

}  // namespace drbench
