#include "drbench/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <thread>

#include "drbench/attack.hpp"
#include "drbench/container.hpp"
#include "drbench/errors.hpp"
#include "drbench/image.hpp"
#include "drbench/metrics.hpp"
#include "drbench/rng.hpp"
#include "drbench/svd.hpp"

namespace drbench {

namespace fs = std::filesystem;

std::string format_sig9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::string config_digest(const std::string& raw_text) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx",
                static_cast<unsigned long long>(fnv1a64(raw_text)));
  return buf;
}

CellKey parse_cell_key(const std::string& text) {
  std::size_t first = text.find(',');
  std::size_t second = text.find(',', first == std::string::npos ? first : first + 1);
  if (first == std::string::npos || second == std::string::npos) {
    throw ConfigError("cell key must be 'method,k,attack', got '" + text + "'");
  }
  CellKey key;
  key.method = text.substr(0, first);
  try {
    key.k = std::stoi(text.substr(first + 1, second - first - 1));
  } catch (...) {
    throw ConfigError("cell key has a non-integer K: '" + text + "'");
  }
  key.attack = text.substr(second + 1);
  return key;
}

namespace {

std::string sanitize_status(std::string msg) {
  for (char& c : msg) {
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  }
  return msg;
}

std::string sanitize_path_component(std::string s) {
  for (char& c : s) {
    if (c == ':' || c == '/' || c == '\\') c = '-';
  }
  return s;
}

struct AccuracyRow {
  std::string method;
  int k = 0;
  std::uint64_t seed = 0;
  std::string classifier;
  std::optional<double> accuracy;
  std::string status = "ok";
};

struct RobustnessRow {
  std::string method;
  int k = 0;
  std::uint64_t seed = 0;
  std::string attack;
  std::optional<double> mse;
  std::optional<double> arr;
  std::optional<double> accuracy;  // theta accuracy on the reconstruction
  std::string status = "ok";
};

constexpr const char* kCsvHeader = "method,k,seed,attack,mse,arr,classifier,accuracy,status\n";

std::string opt_field(const std::optional<double>& v) {
  return v ? format_sig9(*v) : std::string();
}

void write_accuracy_csv(const fs::path& path, std::vector<AccuracyRow> rows) {
  std::sort(rows.begin(), rows.end(), [](const AccuracyRow& a, const AccuracyRow& b) {
    return std::tie(a.method, a.k, a.classifier) < std::tie(b.method, b.k, b.classifier);
  });
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << kCsvHeader;
  for (const AccuracyRow& row : rows) {
    out << row.method << ',' << row.k << ',' << row.seed << ",,,,"
        << row.classifier << ',' << opt_field(row.accuracy) << ',' << row.status
        << '\n';
  }
}

void write_robustness_csv(const fs::path& path, std::vector<RobustnessRow> rows) {
  std::sort(rows.begin(), rows.end(), [](const RobustnessRow& a, const RobustnessRow& b) {
    return std::tie(a.method, a.k, a.attack) < std::tie(b.method, b.k, b.attack);
  });
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << kCsvHeader;
  for (const RobustnessRow& row : rows) {
    out << row.method << ',' << row.k << ',' << row.seed << ',' << row.attack << ','
        << opt_field(row.mse) << ',' << opt_field(row.arr) << ",logistic_regression,"
        << opt_field(row.accuracy) << ',' << row.status << '\n';
  }
}

LabeledDataset load_source(const DataSourceConfig& src) {
  if (src.source == "synthetic") {
    return synth_faces(src.classes, src.per_class, src.image_size * src.image_size,
                       src.seed, src.snr);
  }
  if (src.source == "image_dir") {
    return load_image_dir(src.path, src.image_size);
  }
  if (src.source == "cifar_batches") {
    std::vector<fs::path> files;
    fs::path p(src.path);
    if (fs::is_directory(p)) {
      for (const auto& entry : fs::directory_iterator(p)) {
        if (entry.is_regular_file() && entry.path().extension() == ".bin") {
          files.push_back(entry.path());
        }
      }
      std::sort(files.begin(), files.end());
    } else {
      files.push_back(p);
    }
    return load_cifar_batches(files, src.image_size);
  }
  if (src.source == "cache") {
    return load_dataset_cache(src.path);
  }
  throw ConfigError("unknown data source '" + src.source + "'");
}

std::string seed_tag(const std::string& kind, const std::string& method, int k) {
  return kind + "|" + method + "|" + std::to_string(k);
}

struct AttackPlan {
  std::string id;       // CSV attack column: "pinv" or "regression:<binding>"
  std::string binding;  // empty for pinv
};

std::vector<AttackPlan> attack_plans(const ExperimentConfig& cfg) {
  std::vector<AttackPlan> plans;
  for (const std::string& a : cfg.attacks) {
    AttackPlan plan;
    plan.id = a;
    if (a.rfind("regression:", 0) == 0) {
      plan.binding = a.substr(std::string("regression:").size());
    }
    plans.push_back(plan);
  }
  return plans;
}

std::optional<AttackerType> attacker_type_of(const std::string& binding) {
  if (binding == "train") return AttackerType::Type1;
  if (binding == "external") return AttackerType::Type2;
  return std::nullopt;  // held-out identities: outside the type taxonomy
}

ProjectionMatrix build_projection(const ExperimentConfig& cfg,
                                  const ExperimentContext& ctx, Method method,
                                  int k, std::uint64_t seed) {
  switch (method) {
    case Method::RandomSampling:
      return build_random_sampling(cfg.feature_dim(), k, seed);
    case Method::RandomProjection:
      return build_random_projection(cfg.feature_dim(), k, seed,
                                     cfg.rp_variance_mode == "paper_literal"
                                         ? RpVarianceMode::PaperLiteral
                                         : RpVarianceMode::Standard);
    case Method::Pca:
      return pca_from_basis(*ctx.pca, k, cfg.center);
  }
  throw InvalidSpecError("unhandled method");
}

ReconstructionMatrix build_attack(const ExperimentConfig& cfg,
                                  const ExperimentContext& ctx,
                                  const ProjectionMatrix& pm,
                                  const AttackPlan& plan) {
  if (plan.binding.empty()) return attack_pinv(pm);
  auto it = ctx.attackers.find(plan.binding);
  if (it == ctx.attackers.end()) {
    throw ConfigError("attacker binding '" + plan.binding + "' is not available");
  }
  RegressionOptions opts;
  opts.intercept = cfg.regression_intercept;
  opts.attacker_dataset_id = plan.binding;
  opts.attacker_type = attacker_type_of(plan.binding);
  return attack_regression(pm, it->second.xs, opts);
}

void write_gallery_cell(const fs::path& dir, const LabeledDataset& test,
                        const ProjectionMatrix& pm, const ReconstructionMatrix& rm,
                        const RobustnessReport& report, int image_size, int count) {
  fs::create_directories(dir);
  count = std::min(count, test.size());

  Matrix ys = project_dataset(pm, test.xs);
  Matrix recon = reconstruct(rm, ys);

  GrayImage img;
  img.width = image_size;
  img.height = image_size;
  img.pixels.resize(static_cast<std::size_t>(image_size) * image_size);

  for (int i = 0; i < count; ++i) {
    const double* orig = test.xs.row_ptr(i);
    std::copy(orig, orig + test.dim(), img.pixels.begin());
    char name[64];
    std::snprintf(name, sizeof(name), "orig_%03d.pgm", i);
    write_pgm(dir / name, img);

    const double* rec = recon.row_ptr(i);
    std::copy(rec, rec + test.dim(), img.pixels.begin());
    std::snprintf(name, sizeof(name), "recon_%03d.pgm", i);
    write_pgm(dir / name, img);
  }

  std::ofstream sidecar(dir / "metrics.txt", std::ios::binary);
  sidecar << "method = " << report.method << "\n"
          << "k = " << report.k << "\n"
          << "attack = " << report.attack << "\n"
          << "mse = " << format_sig9(report.mse) << "\n"
          << "arr = " << (report.arr ? format_sig9(*report.arr) : "undefined") << "\n"
          << "acc_original = " << format_sig9(report.acc_original) << "\n"
          << "acc_reconstructed = " << format_sig9(report.acc_reconstructed) << "\n";
}

std::string utc_timestamp() {
  std::time_t now = std::time(nullptr);
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

}  // namespace

ExperimentContext build_context(const ExperimentConfig& cfg) {
  ExperimentContext ctx;

  LabeledDataset base = load_source(cfg.data);
  LabeledDataset main_side;
  if (cfg.classes_per_side > 0) {
    SplitSpec spec;
    spec.class_partition_seed = derive_seed(cfg.master_seed, "class_split");
    spec.per_class_train_fraction = cfg.train_fraction;
    spec.classes_per_side = cfg.classes_per_side;
    auto [main_ds, sub_ds] = split_by_class(base, spec);
    main_side = std::move(main_ds);
    ctx.sub = std::move(sub_ds);
  } else {
    main_side = std::move(base);
  }

  auto split = split_train_test(main_side, cfg.train_fraction,
                                derive_seed(cfg.master_seed, "train_test"));
  ctx.train = std::move(split.first);
  ctx.test = std::move(split.second);

  bool needs_pca = std::any_of(cfg.methods.begin(), cfg.methods.end(),
                               [](const std::string& m) { return m == "pca"; });
  if (needs_pca) ctx.pca = fit_pca_basis(ctx.train.xs);

  for (const AttackPlan& plan : attack_plans(cfg)) {
    if (plan.binding.empty() || ctx.attackers.count(plan.binding)) continue;
    LabeledDataset attacker;
    if (plan.binding == "train") {
      attacker = ctx.train;
    } else if (plan.binding == "sub") {
      if (!ctx.sub) {
        throw ConfigError("attack regression:sub needs a class split (classes_per_side > 0)");
      }
      attacker = *ctx.sub;
    } else if (plan.binding == "external") {
      attacker = load_source(cfg.attacker_external);
      if (attacker.dim() != cfg.feature_dim()) {
        throw ConfigError("external attacker dimension " + std::to_string(attacker.dim()) +
                          " does not match D=" + std::to_string(cfg.feature_dim()));
      }
    } else {
      throw ConfigError("unknown attacker binding '" + plan.binding + "'");
    }
    attacker = subsample_rows(attacker, cfg.attacker_row_cap,
                              derive_seed(cfg.master_seed, "attacker_cap|" + plan.binding));
    ctx.attackers.emplace(plan.binding, std::move(attacker));
  }

  TrainConfig theta_cfg = cfg.logreg_config;
  theta_cfg.seed = derive_seed(cfg.master_seed, "theta");
  ctx.theta = train(ClassifierKind::LogisticRegression, ctx.train.xs, ctx.train.labels,
                    theta_cfg);
  ctx.theta_accuracy = accuracy(ctx.theta, ctx.test.xs, ctx.test.labels);
  return ctx;
}

RunResult run_experiment(const ExperimentConfig& cfg) {
  std::vector<std::string> findings = validate_config(cfg);
  if (!findings.empty()) {
    throw ConfigError("config is not runnable: " + findings.front() +
                      (findings.size() > 1
                           ? " (+" + std::to_string(findings.size() - 1) + " more)"
                           : ""));
  }

  const fs::path out_dir(cfg.output_dir);
  fs::create_directories(out_dir);

  ExperimentContext ctx = build_context(cfg);
  const std::vector<AttackPlan> attacks = attack_plans(cfg);

  struct Cell {
    Method method;
    std::string method_id;
    int k;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (const std::string& m : cfg.methods) {
    Method method = *method_from_name(m);
    for (int k : cfg.k_grid) {
      cells.push_back({method, m, k,
                       derive_seed(cfg.master_seed, seed_tag("projection", m, k))});
    }
  }

  struct CellOutput {
    std::vector<AccuracyRow> accuracy;
    std::vector<RobustnessRow> robustness;
  };
  std::vector<CellOutput> outputs(cells.size());

  auto run_cell = [&](const Cell& cell, CellOutput& out) {
    ProjectionMatrix pm;
    std::string pm_error;
    try {
      pm = build_projection(cfg, ctx, cell.method, cell.k, cell.seed);
    } catch (const std::exception& e) {
      pm_error = sanitize_status(e.what());
    }

    if (pm_error.empty() && cfg.save_matrices) {
      fs::path dir = out_dir / "matrices";
      fs::create_directories(dir);
      save_projection(dir / ("P_" + cell.method_id + "_k" + std::to_string(cell.k) + ".drmx"),
                      pm);
    }

    Matrix y_train, y_test;
    if (pm_error.empty()) {
      y_train = project_dataset(pm, ctx.train.xs);
      y_test = project_dataset(pm, ctx.test.xs);
    }

    for (const std::string& classifier : cfg.classifiers) {
      AccuracyRow row;
      row.method = cell.method_id;
      row.k = cell.k;
      row.seed = cell.seed;
      row.classifier = classifier;
      if (!pm_error.empty()) {
        row.status = "error: " + pm_error;
        out.accuracy.push_back(std::move(row));
        continue;
      }
      try {
        TrainConfig tc;
        if (classifier == "linear_svm") tc = cfg.svm_config;
        else if (classifier == "random_forest") tc = cfg.forest_config;
        tc.seed = derive_seed(cfg.master_seed,
                              seed_tag("classifier", cell.method_id, cell.k) + "|" + classifier);
        Classifier model = train(*classifier_kind_from_name(classifier), y_train,
                                 ctx.train.labels, tc);
        row.accuracy = accuracy(model, y_test, ctx.test.labels);
      } catch (const std::exception& e) {
        row.status = "error: " + sanitize_status(e.what());
      }
      out.accuracy.push_back(std::move(row));
    }

    for (const AttackPlan& plan : attacks) {
      RobustnessRow row;
      row.method = cell.method_id;
      row.k = cell.k;
      row.seed = cell.seed;
      row.attack = plan.id;
      if (!pm_error.empty()) {
        row.status = "error: " + pm_error;
        out.robustness.push_back(std::move(row));
        continue;
      }
      try {
        ReconstructionMatrix rm = build_attack(cfg, ctx, pm, plan);
        EvalOptions opts;
        opts.clip_reconstruction = cfg.clip_reconstruction;
        RobustnessReport report = evaluate_attack(ctx.test.xs, ctx.test.labels, pm, rm,
                                                  ctx.theta, opts);
        row.mse = report.mse;
        row.arr = report.arr;
        row.accuracy = report.acc_reconstructed;
        if (report.status != "ok") row.status = report.status;

        if (cfg.save_matrices) {
          fs::path dir = out_dir / "matrices";
          fs::create_directories(dir);
          save_reconstruction(dir / ("Q_" + cell.method_id + "_k" + std::to_string(cell.k) +
                                     "_" + sanitize_path_component(plan.id) + ".drmx"),
                              rm);
        }
        if (cfg.gallery_count > 0) {
          fs::path dir = out_dir / "gallery" /
                         (cell.method_id + "_k" + std::to_string(cell.k) + "_" +
                          sanitize_path_component(plan.id));
          write_gallery_cell(dir, ctx.test, pm, rm, report, cfg.data.image_size,
                             cfg.gallery_count);
        }
      } catch (const std::exception& e) {
        row.status = "error: " + sanitize_status(e.what());
      }
      out.robustness.push_back(std::move(row));
    }
  };

  int jobs = cfg.jobs > 0 ? cfg.jobs
                          : static_cast<int>(std::thread::hardware_concurrency());
  jobs = std::max(1, std::min<int>(jobs, static_cast<int>(cells.size())));

  if (jobs == 1) {
    for (std::size_t i = 0; i < cells.size(); ++i) run_cell(cells[i], outputs[i]);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(jobs));
    for (int w = 0; w < jobs; ++w) {
      workers.emplace_back([&] {
        for (;;) {
          std::size_t i = next.fetch_add(1);
          if (i >= cells.size()) return;
          run_cell(cells[i], outputs[i]);
        }
      });
    }
    for (std::thread& t : workers) t.join();
  }

  std::vector<AccuracyRow> accuracy_rows;
  std::vector<RobustnessRow> robustness_rows;
  int failed = 0;
  for (CellOutput& out : outputs) {
    for (AccuracyRow& row : out.accuracy) {
      if (row.status.rfind("error", 0) == 0) ++failed;
      accuracy_rows.push_back(std::move(row));
    }
    for (RobustnessRow& row : out.robustness) {
      if (row.status.rfind("error", 0) == 0) ++failed;
      robustness_rows.push_back(std::move(row));
    }
  }

  RunResult result;
  result.cells_total = static_cast<int>(accuracy_rows.size() + robustness_rows.size());
  result.cells_failed = failed;
  result.accuracy_csv = out_dir / "accuracy.csv";
  result.robustness_csv = out_dir / "robustness.csv";
  result.manifest_path = out_dir / "manifest.txt";

  write_accuracy_csv(result.accuracy_csv, std::move(accuracy_rows));
  write_robustness_csv(result.robustness_csv, std::move(robustness_rows));

  RunManifest& manifest = result.manifest;
  manifest.version = "0.1.0";
  manifest.config_digest = config_digest(cfg.raw_text);
  manifest.created_utc = utc_timestamp();
  auto add = [&](const std::string& k, const std::string& v) {
    manifest.entries.emplace_back(k, v);
  };
  add("master_seed", std::to_string(cfg.master_seed));
  add("rng", "xoshiro256** seeded via splitmix64");
  add("seed_derivation", "splitmix64(master ^ fnv1a64(tag))");
  add("pixel_range", "[0,1]");
  add("resize_filter", "bilinear half-pixel centers");
  add("luma_weights", "0.299,0.587,0.114");
  add("rp_variance_mode", cfg.rp_variance_mode);
  add("center", cfg.center ? "true" : "false");
  add("clip_reconstruction", cfg.clip_reconstruction ? "true" : "false");
  add("regression_intercept", cfg.regression_intercept ? "true" : "false");
  add("attacker_row_cap", std::to_string(cfg.attacker_row_cap));
  add("theta_accuracy_on_test", format_sig9(ctx.theta_accuracy));
  add("theta_converged", ctx.theta.converged() ? "true" : "false");
  add("seed.theta", std::to_string(derive_seed(cfg.master_seed, "theta")));
  add("seed.class_split", std::to_string(derive_seed(cfg.master_seed, "class_split")));
  add("seed.train_test", std::to_string(derive_seed(cfg.master_seed, "train_test")));
  for (const Cell& cell : cells) {
    add("seed.projection." + cell.method_id + ".k" + std::to_string(cell.k),
        std::to_string(cell.seed));
  }
  add("rows_total", std::to_string(result.cells_total));
  add("rows_failed", std::to_string(result.cells_failed));

  std::ofstream mf(result.manifest_path, std::ios::binary);
  if (!mf) throw IoError("cannot write " + result.manifest_path.string());
  mf << "drbench_version = " << manifest.version << "\n"
     << "config_digest = " << manifest.config_digest << "\n"
     << "created_utc = " << manifest.created_utc << "\n";
  for (const auto& [k, v] : manifest.entries) mf << k << " = " << v << "\n";

  return result;
}

void emit_reconstruction_gallery(const ExperimentConfig& cfg, const CellKey& cell,
                                 int count) {
  if (count < 0) throw InvalidSpecError("gallery count must be non-negative");

  bool method_ok = std::find(cfg.methods.begin(), cfg.methods.end(), cell.method) !=
                   cfg.methods.end();
  bool k_ok = std::find(cfg.k_grid.begin(), cfg.k_grid.end(), cell.k) != cfg.k_grid.end();
  bool attack_ok = std::find(cfg.attacks.begin(), cfg.attacks.end(), cell.attack) !=
                   cfg.attacks.end();
  if (!method_ok || !k_ok || !attack_ok) {
    std::ostringstream msg;
    msg << "unknown cell '" << cell.method << "," << cell.k << "," << cell.attack
        << "'; available methods:";
    for (const auto& m : cfg.methods) msg << " " << m;
    msg << "; K grid:";
    for (int k : cfg.k_grid) msg << " " << k;
    msg << "; attacks:";
    for (const auto& a : cfg.attacks) msg << " " << a;
    throw ConfigError(msg.str());
  }

  ExperimentContext ctx = build_context(cfg);
  Method method = *method_from_name(cell.method);
  std::uint64_t seed = derive_seed(cfg.master_seed, seed_tag("projection", cell.method, cell.k));
  ProjectionMatrix pm = build_projection(cfg, ctx, method, cell.k, seed);

  AttackPlan plan;
  plan.id = cell.attack;
  if (cell.attack.rfind("regression:", 0) == 0) {
    plan.binding = cell.attack.substr(std::string("regression:").size());
  }
  ReconstructionMatrix rm = build_attack(cfg, ctx, pm, plan);

  EvalOptions opts;
  opts.clip_reconstruction = cfg.clip_reconstruction;
  RobustnessReport report = evaluate_attack(ctx.test.xs, ctx.test.labels, pm, rm,
                                            ctx.theta, opts);

  fs::path dir = fs::path(cfg.output_dir) / "gallery" /
                 (cell.method + "_k" + std::to_string(cell.k) + "_" +
                  sanitize_path_component(cell.attack));
  write_gallery_cell(dir, ctx.test, pm, rm, report, cfg.data.image_size, count);
}

}  // namespace drbench
