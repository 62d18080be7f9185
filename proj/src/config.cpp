#include "drbench/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "drbench/errors.hpp"
#include "drbench/reduction.hpp"

namespace drbench {

namespace {

std::string trim(const std::string& s) {
  std::size_t begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  std::size_t end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

// Strips a trailing comment that is not inside a quoted string.
std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

bool looks_like_int(const std::string& s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  return std::all_of(s.begin() + static_cast<long>(i), s.end(),
                     [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

ConfigValue parse_scalar(const std::string& raw, const std::string& origin, int lineno) {
  if (raw.size() >= 2 && raw.front() == '"' && raw.back() == '"') {
    return raw.substr(1, raw.size() - 2);
  }
  if (raw == "true") return true;
  if (raw == "false") return false;
  if (looks_like_int(raw)) {
    return static_cast<std::int64_t>(std::stoll(raw));
  }
  try {
    std::size_t used = 0;
    double v = std::stod(raw, &used);
    if (used == raw.size()) return v;
  } catch (...) {
  }
  throw ConfigError(origin + ":" + std::to_string(lineno) +
                    ": cannot parse value '" + raw + "'");
}

ConfigValue parse_array(const std::string& inner, const std::string& origin, int lineno) {
  std::vector<std::string> items;
  std::string current;
  bool quoted = false;
  for (char c : inner) {
    if (c == '"') quoted = !quoted;
    if (c == ',' && !quoted) {
      items.push_back(trim(current));
      current.clear();
    } else {
      current += c;
    }
  }
  if (!trim(current).empty()) items.push_back(trim(current));

  std::vector<std::string> strings;
  std::vector<std::int64_t> ints;
  for (const std::string& item : items) {
    ConfigValue v = parse_scalar(item, origin, lineno);
    if (std::holds_alternative<std::string>(v)) {
      strings.push_back(std::get<std::string>(v));
    } else if (std::holds_alternative<std::int64_t>(v)) {
      ints.push_back(std::get<std::int64_t>(v));
    } else {
      throw ConfigError(origin + ":" + std::to_string(lineno) +
                        ": arrays may hold strings or integers only");
    }
  }
  if (!strings.empty() && !ints.empty()) {
    throw ConfigError(origin + ":" + std::to_string(lineno) +
                      ": mixed-type array");
  }
  if (!strings.empty()) return strings;
  return ints;
}

}  // namespace

ConfigTable ConfigTable::parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_text(buffer.str(), path.string());
}

ConfigTable ConfigTable::parse_text(const std::string& text, const std::string& origin) {
  ConfigTable table;
  table.text_ = text;
  table.origin_ = origin;

  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(strip_comment(line));
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError(origin + ":" + std::to_string(lineno) +
                          ": unterminated section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) {
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty section name");
      }
      continue;
    }

    std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(lineno) +
                        ": expected 'key = value', got '" + line + "'");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key or value");
    }
    std::string full_key = section.empty() ? key : section + "." + key;
    if (table.values_.count(full_key)) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": duplicate key '" +
                        full_key + "'");
    }

    if (value.front() == '[') {
      if (value.back() != ']') {
        throw ConfigError(origin + ":" + std::to_string(lineno) +
                          ": unterminated array");
      }
      table.values_[full_key] = parse_array(value.substr(1, value.size() - 2), origin, lineno);
    } else {
      table.values_[full_key] = parse_scalar(value, origin, lineno);
    }
  }
  return table;
}

bool ConfigTable::has(const std::string& key) const { return values_.count(key) > 0; }

void ConfigTable::type_error(const std::string& key, const char* want) const {
  throw ConfigError(origin_ + ": key '" + key + "' is not a " + want);
}

std::string ConfigTable::get_string(const std::string& key, const std::string& dflt) const {
  auto it = values_.find(key);
  if (it == values_.end()) return dflt;
  if (!std::holds_alternative<std::string>(it->second)) type_error(key, "string");
  return std::get<std::string>(it->second);
}

std::int64_t ConfigTable::get_int(const std::string& key, std::int64_t dflt) const {
  auto it = values_.find(key);
  if (it == values_.end()) return dflt;
  if (!std::holds_alternative<std::int64_t>(it->second)) type_error(key, "integer");
  return std::get<std::int64_t>(it->second);
}

double ConfigTable::get_double(const std::string& key, double dflt) const {
  auto it = values_.find(key);
  if (it == values_.end()) return dflt;
  if (std::holds_alternative<std::int64_t>(it->second)) {
    return static_cast<double>(std::get<std::int64_t>(it->second));
  }
  if (!std::holds_alternative<double>(it->second)) type_error(key, "number");
  return std::get<double>(it->second);
}

bool ConfigTable::get_bool(const std::string& key, bool dflt) const {
  auto it = values_.find(key);
  if (it == values_.end()) return dflt;
  if (!std::holds_alternative<bool>(it->second)) type_error(key, "boolean");
  return std::get<bool>(it->second);
}

std::vector<std::string> ConfigTable::get_string_list(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return {};
  if (!std::holds_alternative<std::vector<std::string>>(it->second)) {
    type_error(key, "string array");
  }
  return std::get<std::vector<std::string>>(it->second);
}

std::vector<std::int64_t> ConfigTable::get_int_list(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return {};
  if (std::holds_alternative<std::vector<std::string>>(it->second) &&
      std::get<std::vector<std::string>>(it->second).empty()) {
    return {};  // `[]` parses as an empty string list
  }
  if (!std::holds_alternative<std::vector<std::int64_t>>(it->second)) {
    type_error(key, "integer array");
  }
  return std::get<std::vector<std::int64_t>>(it->second);
}

namespace {

DataSourceConfig read_source(const ConfigTable& t, const std::string& prefix,
                             const DataSourceConfig& defaults) {
  DataSourceConfig src = defaults;
  src.source = t.get_string(prefix + ".source", defaults.source);
  src.path = t.get_string(prefix + ".path", defaults.path);
  src.image_size = static_cast<int>(t.get_int(prefix + ".image_size", defaults.image_size));
  src.classes = static_cast<int>(t.get_int(prefix + ".classes", defaults.classes));
  src.per_class = static_cast<int>(t.get_int(prefix + ".per_class", defaults.per_class));
  src.snr = t.get_double(prefix + ".snr", defaults.snr);
  src.seed = static_cast<std::uint64_t>(t.get_int(prefix + ".seed",
                                                  static_cast<std::int64_t>(defaults.seed)));
  return src;
}

}  // namespace

ExperimentConfig experiment_config_from_table(const ConfigTable& t) {
  ExperimentConfig cfg;
  cfg.raw_text = t.text();

  cfg.data = read_source(t, "data", cfg.data);
  cfg.classes_per_side = static_cast<int>(t.get_int("data.classes_per_side", 19));
  cfg.train_fraction = t.get_double("data.train_fraction", 0.75);

  DataSourceConfig attacker_defaults;
  attacker_defaults.classes = 10;
  attacker_defaults.per_class = 150;
  attacker_defaults.snr = 2.0;
  attacker_defaults.seed = 99;
  attacker_defaults.image_size = cfg.data.image_size;
  cfg.attacker_external = read_source(t, "attacker_external", attacker_defaults);
  cfg.attacker_row_cap = static_cast<int>(t.get_int("attacker_external.row_cap", 20000));

  cfg.methods = t.get_string_list("experiment.methods");
  for (std::int64_t k : t.get_int_list("experiment.k_grid")) {
    cfg.k_grid.push_back(static_cast<int>(k));
  }
  cfg.attacks = t.get_string_list("experiment.attacks");
  cfg.classifiers = t.get_string_list("experiment.classifiers");
  cfg.master_seed = static_cast<std::uint64_t>(t.get_int("experiment.master_seed", 1));
  cfg.output_dir = t.get_string("experiment.output_dir", "out");
  cfg.jobs = static_cast<int>(t.get_int("experiment.jobs", 0));
  cfg.gallery_count = static_cast<int>(t.get_int("experiment.gallery_count", 4));
  cfg.save_matrices = t.get_bool("experiment.save_matrices", false);

  cfg.center = t.get_bool("flags.center", false);
  cfg.clip_reconstruction = t.get_bool("flags.clip_reconstruction", false);
  cfg.regression_intercept = t.get_bool("flags.regression_intercept", false);
  cfg.rp_variance_mode = t.get_string("flags.rp_variance_mode", "standard");

  cfg.svm_config.svm_c = t.get_double("train.linear_svm.c", 1.0);
  cfg.svm_config.svm_epochs = static_cast<int>(t.get_int("train.linear_svm.epochs", 200));
  cfg.forest_config.tree_count = static_cast<int>(t.get_int("train.random_forest.trees", 100));
  cfg.forest_config.max_depth = static_cast<int>(t.get_int("train.random_forest.max_depth", 0));
  cfg.logreg_config.logreg_lambda = t.get_double("train.logistic_regression.lambda", 1e-4);
  cfg.logreg_config.logreg_epochs =
      static_cast<int>(t.get_int("train.logistic_regression.epochs", 500));
  cfg.logreg_config.tolerance = t.get_double("train.logistic_regression.tolerance", 1e-6);

  if (const char* out = std::getenv("DRBENCH_OUT"); out && *out) {
    cfg.output_dir = out;
  }
  if (const char* jobs = std::getenv("DRBENCH_JOBS"); jobs && *jobs) {
    cfg.jobs = std::atoi(jobs);
  }
  return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  return experiment_config_from_table(ConfigTable::parse_file(path));
}

std::vector<std::string> validate_config(const ExperimentConfig& cfg) {
  std::vector<std::string> findings;
  auto flag = [&](const std::string& msg) { findings.push_back(msg); };

  auto check_source = [&](const DataSourceConfig& src, const std::string& who) {
    if (src.source == "synthetic") {
      if (src.classes < 2) flag(who + ": synthetic source needs at least 2 classes");
      if (src.per_class < 1) flag(who + ": per_class must be positive");
    } else if (src.source == "image_dir") {
      if (src.path.empty() || !std::filesystem::is_directory(src.path)) {
        flag(who + ": image_dir path does not exist: '" + src.path + "'");
      }
    } else if (src.source == "cifar_batches") {
      if (src.path.empty() || !std::filesystem::exists(src.path)) {
        flag(who + ": cifar_batches path does not exist: '" + src.path + "'");
      }
    } else if (src.source == "cache") {
      if (src.path.empty() || !std::filesystem::is_regular_file(src.path)) {
        flag(who + ": cache file does not exist: '" + src.path + "'");
      }
    } else {
      flag(who + ": unknown source '" + src.source + "'");
    }
    if (src.image_size < 1) flag(who + ": image_size must be positive");
  };

  check_source(cfg.data, "data");
  if (cfg.classes_per_side < 1) flag("data: classes_per_side must be positive");
  if (!(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0)) {
    flag("data: train_fraction must lie in (0, 1)");
  }
  if (cfg.data.source == "synthetic" && 2 * cfg.classes_per_side > cfg.data.classes) {
    flag("data: classes_per_side * 2 exceeds class count");
  }

  if (cfg.methods.empty()) flag("experiment: methods list is empty");
  for (const std::string& m : cfg.methods) {
    if (!method_from_name(m)) flag("experiment: unknown method '" + m + "'");
  }
  if (cfg.k_grid.empty()) flag("experiment: k_grid is empty");
  const int d = cfg.feature_dim();
  for (int k : cfg.k_grid) {
    if (k < 1) flag("experiment: K=" + std::to_string(k) + " must be positive");
    else if (k > d) {
      flag("experiment: K=" + std::to_string(k) + " exceeds D=" + std::to_string(d));
    }
  }

  bool needs_external = false;
  for (const std::string& a : cfg.attacks) {
    if (a == "pinv") continue;
    if (a.rfind("regression:", 0) == 0) {
      std::string binding = a.substr(std::string("regression:").size());
      if (binding == "external") {
        needs_external = true;
      } else if (binding != "train" && binding != "sub") {
        flag("experiment: unknown attacker binding '" + binding + "'");
      }
      continue;
    }
    flag("experiment: unknown attack '" + a + "'");
  }
  if (needs_external) check_source(cfg.attacker_external, "attacker_external");
  if (cfg.attacker_row_cap < 1) flag("attacker_external: row_cap must be positive");

  for (const std::string& c : cfg.classifiers) {
    if (c != "linear_svm" && c != "random_forest") {
      flag("experiment: unknown classifier '" + c + "'");
    }
  }

  if (cfg.rp_variance_mode != "standard" && cfg.rp_variance_mode != "paper_literal") {
    flag("flags: rp_variance_mode must be 'standard' or 'paper_literal'");
  }
  if (cfg.gallery_count < 0) flag("experiment: gallery_count must be non-negative");
  if (cfg.jobs < 0) flag("experiment: jobs must be non-negative");

  return findings;
}

}  // namespace drbench
