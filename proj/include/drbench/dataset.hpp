#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "drbench/matrix.hpp"

namespace drbench {

// N samples of dimension D with integer class labels; features in [0, 1].
struct LabeledDataset {
  Matrix xs;
  std::vector<int> labels;
  std::string name;
  int class_count = 0;

  int size() const { return xs.rows(); }
  int dim() const { return xs.cols(); }
  void validate() const;
};

struct SplitSpec {
  std::uint64_t class_partition_seed = 0;
  double per_class_train_fraction = 0.75;
  int classes_per_side = 0;
};

// Loads `<root>/<class_name>/<file>` trees of portable anymaps. Class labels
// follow sorted directory names, row order sorted file names. Every image is
// converted to grayscale, resized to size x size and flattened row-major.
LabeledDataset load_image_dir(const std::filesystem::path& root, int size);

// CIFAR-style binary batches: records of 1 label byte + 32x32x3 planar RGB.
// Files are read in the given order; images are converted and resized like
// load_image_dir.
LabeledDataset load_cifar_batches(const std::vector<std::filesystem::path>& files,
                                  int size);

// Splits classes disjointly: the first classes_per_side shuffled classes on
// one side, the next classes_per_side on the other. Labels are re-indexed
// per side in ascending original order.
std::pair<LabeledDataset, LabeledDataset> split_by_class(const LabeledDataset& ds,
                                                         const SplitSpec& spec);

// Stratified per-class split; floor(fraction * n_c) rows per class go to
// train, the remainder to test.
std::pair<LabeledDataset, LabeledDataset> split_train_test(const LabeledDataset& ds,
                                                           double train_fraction,
                                                           std::uint64_t seed);

// Synthetic stand-in for a face dataset: smooth per-class prototypes over a
// shared base pattern plus Gaussian pixel noise, clipped to [0, 1]. snr
// scales prototype contrast against the noise.
LabeledDataset synth_faces(int classes, int per_class, int d, std::uint64_t seed,
                           double snr = 4.0);

// Keeps at most `cap` rows, chosen by a seeded draw without replacement;
// original row order is preserved. No-op when the dataset fits the cap.
LabeledDataset subsample_rows(const LabeledDataset& ds, int cap, std::uint64_t seed);

}  // namespace drbench
