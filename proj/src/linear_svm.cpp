#include <cmath>
#include <limits>
#include <vector>

#include "classify_internal.hpp"

namespace drbench::detail {

namespace {

// One-vs-rest linear SVM: hinge loss with L2 regularization, full-batch
// subgradient descent, learning rate 1/(lambda*t). The bias is realized as a
// constant augmented feature. Training needs no randomness; the seed is
// accepted for interface uniformity.
class LinearSvmModel : public Model {
 public:
  ClassifierKind kind() const override { return ClassifierKind::LinearSvm; }
  int num_classes() const override { return num_classes_; }
  int input_dim() const override { return input_dim_; }
  bool converged() const override { return converged_; }
  const std::vector<double>& loss_history() const override { return losses_; }

  std::vector<int> predict(const Matrix& xs) const override {
    std::vector<int> out(static_cast<std::size_t>(xs.rows()));
    for (int i = 0; i < xs.rows(); ++i) {
      const double* row = xs.row_ptr(i);
      int best = 0;
      double best_margin = margin(0, row);
      for (int c = 1; c < num_classes_; ++c) {
        double m = margin(c, row);
        if (m > best_margin) {  // ties keep the smaller class id
          best_margin = m;
          best = c;
        }
      }
      out[static_cast<std::size_t>(i)] = best;
    }
    return out;
  }

  int num_classes_ = 0;
  int input_dim_ = 0;
  bool converged_ = false;
  std::vector<double> losses_;
  Matrix weights;  // num_classes x (input_dim + 1), last column is the bias

 private:
  double margin(int c, const double* row) const {
    const double* w = weights.row_ptr(c);
    double acc = w[input_dim_];
    for (int j = 0; j < input_dim_; ++j) acc += w[j] * row[j];
    return acc;
  }
};

}  // namespace

std::shared_ptr<const Model> train_linear_svm(const Matrix& xs,
                                              const std::vector<int>& labels,
                                              int num_classes,
                                              const TrainConfig& cfg) {
  const int n = xs.rows();
  const int f = xs.cols();
  const double lambda = 1.0 / (cfg.svm_c * static_cast<double>(n));

  auto model = std::make_shared<LinearSvmModel>();
  model->num_classes_ = num_classes;
  model->input_dim_ = f;
  model->weights = Matrix(num_classes, f + 1, 0.0);
  model->losses_.assign(static_cast<std::size_t>(cfg.svm_epochs), 0.0);

  std::vector<double> grad(static_cast<std::size_t>(f) + 1);
  bool all_converged = true;

  for (int c = 0; c < num_classes; ++c) {
    double* w = model->weights.row_ptr(c);
    double prev_objective = 0.0;
    double last_change = std::numeric_limits<double>::infinity();
    for (int t = 1; t <= cfg.svm_epochs; ++t) {
      std::fill(grad.begin(), grad.end(), 0.0);
      double hinge_sum = 0.0;
      for (int i = 0; i < n; ++i) {
        const double* row = xs.row_ptr(i);
        double target = labels[static_cast<std::size_t>(i)] == c ? 1.0 : -1.0;
        double m = w[f];
        for (int j = 0; j < f; ++j) m += w[j] * row[j];
        double slack = 1.0 - target * m;
        if (slack > 0.0) {
          hinge_sum += slack;
          for (int j = 0; j < f; ++j) grad[static_cast<std::size_t>(j)] -= target * row[j];
          grad[static_cast<std::size_t>(f)] -= target;
        }
      }
      double wnorm2 = 0.0;
      for (int j = 0; j <= f; ++j) wnorm2 += w[j] * w[j];
      double objective = 0.5 * lambda * wnorm2 + hinge_sum / n;
      model->losses_[static_cast<std::size_t>(t - 1)] += objective;

      double lr = 1.0 / (lambda * static_cast<double>(t));
      for (int j = 0; j <= f; ++j) {
        w[j] -= lr * (lambda * w[j] + grad[static_cast<std::size_t>(j)] / n);
      }

      if (t > 1) {
        last_change = std::fabs(objective - prev_objective) /
                      std::max(1.0, std::fabs(prev_objective));
      }
      prev_objective = objective;
    }
    if (last_change > cfg.tolerance) all_converged = false;
  }

  model->converged_ = all_converged;
  return model;
}

}  // namespace drbench::detail
