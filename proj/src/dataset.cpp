#include "drbench/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>

#include "drbench/errors.hpp"
#include "drbench/image.hpp"
#include "drbench/rng.hpp"

namespace drbench {

namespace fs = std::filesystem;

void LabeledDataset::validate() const {
  if (labels.size() != static_cast<std::size_t>(xs.rows())) {
    throw InvalidSpecError("dataset " + name + ": " + std::to_string(xs.rows()) +
                           " rows vs " + std::to_string(labels.size()) + " labels");
  }
  for (int label : labels) {
    if (label < 0 || label >= class_count) {
      throw InvalidSpecError("dataset " + name + ": label " + std::to_string(label) +
                             " outside [0, " + std::to_string(class_count) + ")");
    }
  }
  for (double v : xs.data()) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw InvalidSpecError("dataset " + name + ": feature outside [0, 1]");
    }
  }
}

namespace {

void append_image(Matrix& xs, int row, const GrayImage& img, int size) {
  GrayImage resized = (img.width == size && img.height == size)
                          ? img
                          : resize_bilinear(img, size, size);
  double* dst = xs.row_ptr(row);
  for (std::size_t i = 0; i < resized.pixels.size(); ++i) {
    dst[i] = std::clamp(resized.pixels[i], 0.0, 1.0);
  }
}

}  // namespace

LabeledDataset load_image_dir(const fs::path& root, int size) {
  if (size < 1) throw InvalidSpecError("image size must be positive");
  if (!fs::is_directory(root)) {
    throw IoError("image directory not found: " + root.string());
  }

  std::vector<fs::path> class_dirs;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory()) class_dirs.push_back(entry.path());
  }
  std::sort(class_dirs.begin(), class_dirs.end());
  if (class_dirs.empty()) {
    throw IoError("no class subdirectories under " + root.string());
  }

  std::vector<std::vector<fs::path>> files_per_class;
  int total = 0;
  for (const auto& dir : class_dirs) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) {
      throw IoError("empty class directory: " + dir.string());
    }
    total += static_cast<int>(files.size());
    files_per_class.push_back(std::move(files));
  }

  LabeledDataset ds;
  ds.name = root.filename().string();
  ds.class_count = static_cast<int>(class_dirs.size());
  ds.xs = Matrix(total, size * size);
  ds.labels.reserve(static_cast<std::size_t>(total));

  int row = 0;
  for (std::size_t c = 0; c < files_per_class.size(); ++c) {
    for (const auto& file : files_per_class[c]) {
      append_image(ds.xs, row, read_pnm(file), size);
      ds.labels.push_back(static_cast<int>(c));
      ++row;
    }
  }
  ds.validate();
  return ds;
}

LabeledDataset load_cifar_batches(const std::vector<fs::path>& files, int size) {
  if (size < 1) throw InvalidSpecError("image size must be positive");
  if (files.empty()) throw IoError("no cifar batch files given");

  constexpr int kSide = 32;
  constexpr std::size_t kPlane = kSide * kSide;
  constexpr std::size_t kRecord = 1 + 3 * kPlane;

  std::vector<std::vector<unsigned char>> blobs;
  int total = 0;
  for (const auto& file : files) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw IoError("cannot open cifar batch " + file.string());
    std::vector<unsigned char> blob((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    if (blob.empty() || blob.size() % kRecord != 0) {
      throw IoError("cifar batch " + file.string() + " has invalid length " +
                    std::to_string(blob.size()));
    }
    total += static_cast<int>(blob.size() / kRecord);
    blobs.push_back(std::move(blob));
  }

  LabeledDataset ds;
  ds.name = "cifar";
  ds.class_count = 10;
  ds.xs = Matrix(total, size * size);
  ds.labels.reserve(static_cast<std::size_t>(total));

  GrayImage img;
  img.width = kSide;
  img.height = kSide;
  img.pixels.resize(kPlane);

  int row = 0;
  for (const auto& blob : blobs) {
    for (std::size_t off = 0; off < blob.size(); off += kRecord) {
      int label = blob[off];
      if (label < 0 || label > 9) {
        throw IoError("cifar label " + std::to_string(label) + " out of range");
      }
      const unsigned char* r = blob.data() + off + 1;
      const unsigned char* g = r + kPlane;
      const unsigned char* b = g + kPlane;
      for (std::size_t i = 0; i < kPlane; ++i) {
        img.pixels[i] = luma(r[i] / 255.0, g[i] / 255.0, b[i] / 255.0);
      }
      append_image(ds.xs, row, img, size);
      ds.labels.push_back(label);
      ++row;
    }
  }
  ds.validate();
  return ds;
}

namespace {

LabeledDataset take_rows(const LabeledDataset& ds, const std::vector<int>& rows,
                         const std::string& name, int class_count,
                         const std::map<int, int>& label_map) {
  LabeledDataset out;
  out.name = name;
  out.class_count = class_count;
  out.xs = Matrix(static_cast<int>(rows.size()), ds.dim());
  out.labels.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double* src = ds.xs.row_ptr(rows[i]);
    double* dst = out.xs.row_ptr(static_cast<int>(i));
    std::copy(src, src + ds.dim(), dst);
    int original = ds.labels[static_cast<std::size_t>(rows[i])];
    out.labels.push_back(label_map.empty() ? original : label_map.at(original));
  }
  return out;
}

}  // namespace

std::pair<LabeledDataset, LabeledDataset> split_by_class(const LabeledDataset& ds,
                                                         const SplitSpec& spec) {
  ds.validate();
  const int per_side = spec.classes_per_side;
  if (per_side < 1 || 2 * per_side > ds.class_count) {
    throw InvalidSpecError("cannot place " + std::to_string(per_side) +
                           " classes per side with " +
                           std::to_string(ds.class_count) + " classes");
  }

  std::vector<int> classes(static_cast<std::size_t>(ds.class_count));
  std::iota(classes.begin(), classes.end(), 0);
  Xoshiro256 rng(spec.class_partition_seed);
  rng.shuffle(classes);

  auto side = [&](int offset, const std::string& suffix) {
    std::vector<int> picked(classes.begin() + offset,
                            classes.begin() + offset + per_side);
    std::sort(picked.begin(), picked.end());
    std::map<int, int> label_map;
    for (int i = 0; i < per_side; ++i) label_map[picked[static_cast<std::size_t>(i)]] = i;
    std::vector<int> rows;
    for (int r = 0; r < ds.size(); ++r) {
      if (label_map.count(ds.labels[static_cast<std::size_t>(r)])) rows.push_back(r);
    }
    return take_rows(ds, rows, ds.name + suffix, per_side, label_map);
  };

  return {side(0, "_main"), side(per_side, "_sub")};
}

std::pair<LabeledDataset, LabeledDataset> split_train_test(const LabeledDataset& ds,
                                                           double train_fraction,
                                                           std::uint64_t seed) {
  ds.validate();
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw InvalidSpecError("train fraction must lie in (0, 1)");
  }

  std::vector<std::vector<int>> rows_per_class(static_cast<std::size_t>(ds.class_count));
  for (int r = 0; r < ds.size(); ++r) {
    rows_per_class[static_cast<std::size_t>(ds.labels[static_cast<std::size_t>(r)])].push_back(r);
  }

  std::vector<int> train_rows, test_rows;
  for (int c = 0; c < ds.class_count; ++c) {
    auto& rows = rows_per_class[static_cast<std::size_t>(c)];
    if (rows.size() < 2) {
      throw InvalidSpecError("class " + std::to_string(c) +
                             " has fewer than 2 samples, cannot split");
    }
    Xoshiro256 rng(derive_seed(seed, "train_test|" + std::to_string(c)));
    rng.shuffle(rows);
    int n_train = static_cast<int>(std::floor(train_fraction * rows.size()));
    n_train = std::clamp(n_train, 1, static_cast<int>(rows.size()) - 1);
    std::vector<int> head(rows.begin(), rows.begin() + n_train);
    std::vector<int> tail(rows.begin() + n_train, rows.end());
    std::sort(head.begin(), head.end());
    std::sort(tail.begin(), tail.end());
    train_rows.insert(train_rows.end(), head.begin(), head.end());
    test_rows.insert(test_rows.end(), tail.begin(), tail.end());
  }
  std::sort(train_rows.begin(), train_rows.end());
  std::sort(test_rows.begin(), test_rows.end());

  return {take_rows(ds, train_rows, ds.name + "_train", ds.class_count, {}),
          take_rows(ds, test_rows, ds.name + "_test", ds.class_count, {})};
}

namespace {

// Smooth random field in [0, 1]: coarse uniform grid upsampled bilinearly
// when d is a perfect square, moving-average smoothed noise otherwise.
std::vector<double> smooth_field(Xoshiro256& rng, int d) {
  int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(d))));
  if (side * side == d && side >= 4) {
    int coarse = std::max(2, side / 4);
    GrayImage grid;
    grid.width = coarse;
    grid.height = coarse;
    grid.pixels.resize(static_cast<std::size_t>(coarse) * coarse);
    for (double& v : grid.pixels) v = rng.next_double();
    GrayImage up = resize_bilinear(grid, side, side);
    return up.pixels;
  }
  std::vector<double> noise(static_cast<std::size_t>(d));
  for (double& v : noise) v = rng.next_double();
  int window = std::max(1, d / 16);
  std::vector<double> out(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    double acc = 0.0;
    int count = 0;
    for (int j = std::max(0, i - window); j <= std::min(d - 1, i + window); ++j) {
      acc += noise[static_cast<std::size_t>(j)];
      ++count;
    }
    out[static_cast<std::size_t>(i)] = acc / count;
  }
  return out;
}

}  // namespace

LabeledDataset synth_faces(int classes, int per_class, int d, std::uint64_t seed,
                           double snr) {
  if (classes < 1 || per_class < 1 || d < 1) {
    throw InvalidSpecError("synth_faces counts must be positive");
  }
  if (!(snr > 0.0)) throw InvalidSpecError("snr must be positive");

  constexpr double kContrast = 0.5;  // prototype deviation around the base
  const double noise_sigma = 0.25 / snr;

  Xoshiro256 rng(seed);
  std::vector<double> base = smooth_field(rng, d);

  Matrix prototypes(classes, d);
  for (int c = 0; c < classes; ++c) {
    std::vector<double> field = smooth_field(rng, d);
    double* row = prototypes.row_ptr(c);
    for (int j = 0; j < d; ++j) {
      double v = base[static_cast<std::size_t>(j)] +
                 kContrast * (field[static_cast<std::size_t>(j)] - 0.5);
      row[j] = std::clamp(v, 0.0, 1.0);
    }
  }

  LabeledDataset ds;
  ds.name = "synth_faces";
  ds.class_count = classes;
  ds.xs = Matrix(classes * per_class, d);
  ds.labels.reserve(static_cast<std::size_t>(classes) * per_class);

  int row = 0;
  for (int c = 0; c < classes; ++c) {
    const double* proto = prototypes.row_ptr(c);
    for (int s = 0; s < per_class; ++s) {
      double* dst = ds.xs.row_ptr(row);
      for (int j = 0; j < d; ++j) {
        dst[j] = std::clamp(proto[j] + noise_sigma * rng.next_gaussian(), 0.0, 1.0);
      }
      ds.labels.push_back(c);
      ++row;
    }
  }
  ds.validate();
  return ds;
}

LabeledDataset subsample_rows(const LabeledDataset& ds, int cap, std::uint64_t seed) {
  if (cap < 1) throw InvalidSpecError("row cap must be positive");
  if (ds.size() <= cap) return ds;

  std::vector<int> rows(static_cast<std::size_t>(ds.size()));
  std::iota(rows.begin(), rows.end(), 0);
  Xoshiro256 rng(seed);
  rng.shuffle(rows);
  rows.resize(static_cast<std::size_t>(cap));
  std::sort(rows.begin(), rows.end());
  LabeledDataset out = take_rows(ds, rows, ds.name + "_capped", ds.class_count, {});
  return out;
}

}  // namespace drbench
