#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "classify_internal.hpp"
#include "drbench/rng.hpp"

namespace drbench::detail {

namespace {

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  int label = 0;
};

struct Tree {
  std::vector<TreeNode> nodes;

  int predict(const double* row) const {
    int idx = 0;
    while (nodes[static_cast<std::size_t>(idx)].feature >= 0) {
      const TreeNode& node = nodes[static_cast<std::size_t>(idx)];
      idx = row[node.feature] <= node.threshold ? node.left : node.right;
    }
    return nodes[static_cast<std::size_t>(idx)].label;
  }
};

class ForestModel : public Model {
 public:
  ClassifierKind kind() const override { return ClassifierKind::RandomForest; }
  int num_classes() const override { return num_classes_; }
  int input_dim() const override { return input_dim_; }

  std::vector<int> predict(const Matrix& xs) const override {
    std::vector<int> out(static_cast<std::size_t>(xs.rows()));
    std::vector<int> votes(static_cast<std::size_t>(num_classes_));
    for (int i = 0; i < xs.rows(); ++i) {
      std::fill(votes.begin(), votes.end(), 0);
      const double* row = xs.row_ptr(i);
      for (const Tree& tree : trees) votes[static_cast<std::size_t>(tree.predict(row))]++;
      int best = 0;
      for (int c = 1; c < num_classes_; ++c)
        if (votes[static_cast<std::size_t>(c)] > votes[static_cast<std::size_t>(best)]) best = c;
      out[static_cast<std::size_t>(i)] = best;
    }
    return out;
  }

  int num_classes_ = 0;
  int input_dim_ = 0;
  std::vector<Tree> trees;
};

struct TreeBuilder {
  const Matrix& xs;
  const std::vector<int>& labels;
  int num_classes;
  int features_per_split;
  int max_depth;
  Xoshiro256& rng;
  Tree& tree;

  std::vector<int> feature_pool;

  int majority(const std::vector<int>& idx) const {
    std::vector<int> counts(static_cast<std::size_t>(num_classes), 0);
    for (int i : idx) counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])]++;
    int best = 0;
    for (int c = 1; c < num_classes; ++c)
      if (counts[static_cast<std::size_t>(c)] > counts[static_cast<std::size_t>(best)]) best = c;
    return best;
  }

  bool pure(const std::vector<int>& idx) const {
    int first = labels[static_cast<std::size_t>(idx.front())];
    for (int i : idx)
      if (labels[static_cast<std::size_t>(i)] != first) return false;
    return true;
  }

  // Weighted gini of a candidate split; lower is better.
  static double gini_of(const std::vector<int>& counts, int total) {
    if (total == 0) return 0.0;
    double acc = 1.0;
    for (int c : counts) {
      double p = static_cast<double>(c) / total;
      acc -= p * p;
    }
    return acc;
  }

  int build(std::vector<int> idx, int depth) {
    int node_id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();

    bool depth_capped = max_depth > 0 && depth >= max_depth;
    if (idx.size() < 2 || depth_capped || pure(idx)) {
      tree.nodes[static_cast<std::size_t>(node_id)].label = majority(idx);
      return node_id;
    }

    // Draw the feature subset for this node (partial Fisher-Yates).
    const int f = xs.cols();
    for (int pick = 0; pick < features_per_split; ++pick) {
      int j = pick + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(f - pick)));
      std::swap(feature_pool[static_cast<std::size_t>(pick)],
                feature_pool[static_cast<std::size_t>(j)]);
    }

    double best_impurity = 1e300;
    int best_feature = -1;
    double best_threshold = 0.0;

    std::vector<std::pair<double, int>> sorted;
    sorted.reserve(idx.size());
    std::vector<int> left_counts(static_cast<std::size_t>(num_classes));
    std::vector<int> right_counts(static_cast<std::size_t>(num_classes));

    for (int pick = 0; pick < features_per_split; ++pick) {
      int feature = feature_pool[static_cast<std::size_t>(pick)];
      sorted.clear();
      for (int i : idx) sorted.emplace_back(xs(i, feature), i);
      std::sort(sorted.begin(), sorted.end());

      std::fill(left_counts.begin(), left_counts.end(), 0);
      std::fill(right_counts.begin(), right_counts.end(), 0);
      for (int i : idx) right_counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])]++;

      const int total = static_cast<int>(idx.size());
      for (int pos = 0; pos + 1 < total; ++pos) {
        int label = labels[static_cast<std::size_t>(sorted[static_cast<std::size_t>(pos)].second)];
        left_counts[static_cast<std::size_t>(label)]++;
        right_counts[static_cast<std::size_t>(label)]--;
        double v = sorted[static_cast<std::size_t>(pos)].first;
        double next = sorted[static_cast<std::size_t>(pos + 1)].first;
        if (v == next) continue;
        int nl = pos + 1;
        int nr = total - nl;
        double impurity = (nl * gini_of(left_counts, nl) +
                           nr * gini_of(right_counts, nr)) / total;
        if (impurity < best_impurity) {
          best_impurity = impurity;
          best_feature = feature;
          best_threshold = 0.5 * (v + next);
        }
      }
    }

    if (best_feature < 0) {  // all candidate features constant on this node
      tree.nodes[static_cast<std::size_t>(node_id)].label = majority(idx);
      return node_id;
    }

    std::vector<int> left_idx, right_idx;
    for (int i : idx) {
      if (xs(i, best_feature) <= best_threshold) left_idx.push_back(i);
      else right_idx.push_back(i);
    }
    idx.clear();
    idx.shrink_to_fit();

    int left = build(std::move(left_idx), depth + 1);
    int right = build(std::move(right_idx), depth + 1);
    TreeNode& node = tree.nodes[static_cast<std::size_t>(node_id)];
    node.feature = best_feature;
    node.threshold = best_threshold;
    node.left = left;
    node.right = right;
    return node_id;
  }
};

}  // namespace

std::shared_ptr<const Model> train_random_forest(const Matrix& xs,
                                                 const std::vector<int>& labels,
                                                 int num_classes,
                                                 const TrainConfig& cfg) {
  const int n = xs.rows();
  const int f = xs.cols();
  int features_per_split =
      std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(f)))));

  auto model = std::make_shared<ForestModel>();
  model->num_classes_ = num_classes;
  model->input_dim_ = f;
  model->trees.resize(static_cast<std::size_t>(cfg.tree_count));

  for (int t = 0; t < cfg.tree_count; ++t) {
    Xoshiro256 rng(cfg.seed + static_cast<std::uint64_t>(t));

    std::vector<int> bootstrap(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
      bootstrap[static_cast<std::size_t>(i)] =
          static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
    std::sort(bootstrap.begin(), bootstrap.end());

    Tree& tree = model->trees[static_cast<std::size_t>(t)];
    TreeBuilder builder{xs, labels, num_classes, features_per_split,
                        cfg.max_depth, rng, tree, {}};
    builder.feature_pool.resize(static_cast<std::size_t>(f));
    std::iota(builder.feature_pool.begin(), builder.feature_pool.end(), 0);
    builder.build(std::move(bootstrap), 0);
  }

  return model;
}

}  // namespace drbench::detail
