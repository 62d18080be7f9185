#include <cmath>
#include <vector>

#include "classify_internal.hpp"

namespace drbench::detail {

namespace {

// Multinomial softmax regression with L2 penalty, trained by full-batch
// gradient descent with backtracking so the loss never increases. The bias
// is an augmented constant feature. Deterministic: zero init, no sampling.
class LogisticModel : public Model {
 public:
  ClassifierKind kind() const override { return ClassifierKind::LogisticRegression; }
  int num_classes() const override { return num_classes_; }
  int input_dim() const override { return input_dim_; }
  bool converged() const override { return converged_; }
  const std::vector<double>& loss_history() const override { return losses_; }

  std::vector<int> predict(const Matrix& xs) const override {
    std::vector<int> out(static_cast<std::size_t>(xs.rows()));
    for (int i = 0; i < xs.rows(); ++i) {
      const double* row = xs.row_ptr(i);
      int best = 0;
      double best_score = score(0, row);
      for (int c = 1; c < num_classes_; ++c) {
        double s = score(c, row);
        if (s > best_score) {
          best_score = s;
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
  Matrix weights;  // num_classes x (input_dim + 1)

 private:
  double score(int c, const double* row) const {
    const double* w = weights.row_ptr(c);
    double acc = w[input_dim_];
    for (int j = 0; j < input_dim_; ++j) acc += w[j] * row[j];
    return acc;
  }
};

// Mean cross-entropy plus the L2 term, and its gradient.
double loss_and_gradient(const Matrix& xs, const std::vector<int>& labels,
                         const Matrix& w, double lambda, Matrix* grad) {
  const int n = xs.rows();
  const int f = xs.cols();
  const int c = w.rows();
  if (grad) *grad = Matrix(c, f + 1, 0.0);

  std::vector<double> scores(static_cast<std::size_t>(c));
  double nll = 0.0;
  for (int i = 0; i < n; ++i) {
    const double* row = xs.row_ptr(i);
    double mx = -1e300;
    for (int k = 0; k < c; ++k) {
      const double* wk = w.row_ptr(k);
      double s = wk[f];
      for (int j = 0; j < f; ++j) s += wk[j] * row[j];
      scores[static_cast<std::size_t>(k)] = s;
      mx = std::max(mx, s);
    }
    double denom = 0.0;
    for (int k = 0; k < c; ++k) {
      scores[static_cast<std::size_t>(k)] = std::exp(scores[static_cast<std::size_t>(k)] - mx);
      denom += scores[static_cast<std::size_t>(k)];
    }
    int y = labels[static_cast<std::size_t>(i)];
    nll -= std::log(scores[static_cast<std::size_t>(y)] / denom);
    if (grad) {
      for (int k = 0; k < c; ++k) {
        double p = scores[static_cast<std::size_t>(k)] / denom;
        double coeff = p - (k == y ? 1.0 : 0.0);
        double* gk = grad->row_ptr(k);
        for (int j = 0; j < f; ++j) gk[j] += coeff * row[j];
        gk[f] += coeff;
      }
    }
  }

  double reg = 0.0;
  for (double v : w.data()) reg += v * v;
  double loss = nll / n + 0.5 * lambda * reg;
  if (grad) {
    for (std::size_t idx = 0; idx < grad->data().size(); ++idx) {
      grad->data()[idx] = grad->data()[idx] / n + lambda * w.data()[idx];
    }
  }
  return loss;
}

}  // namespace

std::shared_ptr<const Model> train_logistic_regression(
    const Matrix& xs, const std::vector<int>& labels, int num_classes,
    const TrainConfig& cfg) {
  const int f = xs.cols();

  auto model = std::make_shared<LogisticModel>();
  model->num_classes_ = num_classes;
  model->input_dim_ = f;
  model->weights = Matrix(num_classes, f + 1, 0.0);
  model->losses_.reserve(static_cast<std::size_t>(cfg.logreg_epochs));

  Matrix grad;
  double loss = loss_and_gradient(xs, labels, model->weights, cfg.logreg_lambda, &grad);
  double step = 1.0;
  bool converged = false;

  for (int epoch = 0; epoch < cfg.logreg_epochs; ++epoch) {
    model->losses_.push_back(loss);

    Matrix candidate = model->weights;
    double new_loss = loss;
    bool accepted = false;
    for (int half = 0; half < 40; ++half) {
      for (std::size_t idx = 0; idx < candidate.data().size(); ++idx) {
        candidate.data()[idx] = model->weights.data()[idx] - step * grad.data()[idx];
      }
      new_loss = loss_and_gradient(xs, labels, candidate, cfg.logreg_lambda, nullptr);
      if (new_loss <= loss) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      converged = true;  // no descent direction at machine precision
      break;
    }

    model->weights = std::move(candidate);
    double change = loss - new_loss;
    loss = loss_and_gradient(xs, labels, model->weights, cfg.logreg_lambda, &grad);
    step *= 1.1;

    if (change <= cfg.tolerance * std::max(1.0, std::fabs(loss))) {
      converged = true;
      model->losses_.push_back(loss);
      break;
    }
  }

  model->converged_ = converged;
  return model;
}

}  // namespace drbench::detail
