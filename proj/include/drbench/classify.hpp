#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "drbench/matrix.hpp"

namespace drbench {

enum class ClassifierKind { LinearSvm, RandomForest, LogisticRegression };

std::string classifier_kind_name(ClassifierKind kind);
std::optional<ClassifierKind> classifier_kind_from_name(const std::string& name);

struct TrainConfig {
  std::uint64_t seed = 1;
  double tolerance = 1e-6;

  // linear SVM (one-vs-rest hinge, subgradient descent, lr 1/(lambda*t))
  double svm_c = 1.0;
  int svm_epochs = 200;

  // random forest (CART, gini, bootstrap, sqrt(F) features per split)
  int tree_count = 100;
  int max_depth = 0;  // 0 = unlimited

  // logistic regression (multinomial softmax, full-batch gradient descent)
  double logreg_lambda = 1e-4;
  int logreg_epochs = 500;

  // optional per-feature standardization fitted on the training data
  bool standardize = false;
};

namespace detail {
class Model;
}

// Immutable trained model; cheap to copy and safe to share across threads.
class Classifier {
 public:
  ClassifierKind kind() const;
  int num_classes() const;
  int input_dim() const;
  bool converged() const;

  std::vector<int> predict(const Matrix& xs) const;

  // Per-epoch training loss where the trainer tracks one (logistic
  // regression and SVM); empty for the forest.
  const std::vector<double>& loss_history() const;

 private:
  friend Classifier train(ClassifierKind, const Matrix&,
                          const std::vector<int>&, const TrainConfig&);
  std::shared_ptr<const detail::Model> model_;
};

Classifier train(ClassifierKind kind, const Matrix& xs,
                 const std::vector<int>& labels, const TrainConfig& cfg = {});

double accuracy(const Classifier& c, const Matrix& xs,
                const std::vector<int>& labels);

}  // namespace drbench
