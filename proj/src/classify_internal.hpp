#pragma once

#include <memory>
#include <vector>

#include "drbench/classify.hpp"
#include "drbench/matrix.hpp"

namespace drbench::detail {

class Model {
 public:
  virtual ~Model() = default;
  virtual ClassifierKind kind() const = 0;
  virtual int num_classes() const = 0;
  virtual int input_dim() const = 0;
  virtual bool converged() const { return true; }
  virtual const std::vector<double>& loss_history() const {
    static const std::vector<double> empty;
    return empty;
  }
  // xs has already been standardized if the model requires it.
  virtual std::vector<int> predict(const Matrix& xs) const = 0;

  // Standardization state, applied by the Classifier wrapper.
  std::vector<double> feature_mean;
  std::vector<double> feature_scale;
};

std::shared_ptr<const Model> train_linear_svm(const Matrix& xs,
                                              const std::vector<int>& labels,
                                              int num_classes,
                                              const TrainConfig& cfg);

std::shared_ptr<const Model> train_random_forest(const Matrix& xs,
                                                 const std::vector<int>& labels,
                                                 int num_classes,
                                                 const TrainConfig& cfg);

std::shared_ptr<const Model> train_logistic_regression(
    const Matrix& xs, const std::vector<int>& labels, int num_classes,
    const TrainConfig& cfg);

}  // namespace drbench::detail
