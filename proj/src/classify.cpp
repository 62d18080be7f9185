#include "drbench/classify.hpp"

#include <algorithm>
#include <cmath>

#include "classify_internal.hpp"
#include "drbench/errors.hpp"

namespace drbench {

std::string classifier_kind_name(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::LinearSvm: return "linear_svm";
    case ClassifierKind::RandomForest: return "random_forest";
    case ClassifierKind::LogisticRegression: return "logistic_regression";
  }
  return "unknown";
}

std::optional<ClassifierKind> classifier_kind_from_name(const std::string& name) {
  if (name == "linear_svm") return ClassifierKind::LinearSvm;
  if (name == "random_forest") return ClassifierKind::RandomForest;
  if (name == "logistic_regression") return ClassifierKind::LogisticRegression;
  return std::nullopt;
}

ClassifierKind Classifier::kind() const { return model_->kind(); }
int Classifier::num_classes() const { return model_->num_classes(); }
int Classifier::input_dim() const { return model_->input_dim(); }
bool Classifier::converged() const { return model_->converged(); }
const std::vector<double>& Classifier::loss_history() const {
  return model_->loss_history();
}

namespace {

Matrix apply_standardization(const detail::Model& model, const Matrix& xs) {
  Matrix out = xs;
  for (int i = 0; i < out.rows(); ++i) {
    double* row = out.row_ptr(i);
    for (int j = 0; j < out.cols(); ++j) {
      row[j] = (row[j] - model.feature_mean[static_cast<std::size_t>(j)]) /
               model.feature_scale[static_cast<std::size_t>(j)];
    }
  }
  return out;
}

}  // namespace

std::vector<int> Classifier::predict(const Matrix& xs) const {
  if (xs.rows() == 0) return {};
  if (xs.cols() != model_->input_dim()) {
    throw ShapeError("classifier expects " + std::to_string(model_->input_dim()) +
                     " features, got " + std::to_string(xs.cols()));
  }
  if (!model_->feature_mean.empty()) {
    return model_->predict(apply_standardization(*model_, xs));
  }
  return model_->predict(xs);
}

Classifier train(ClassifierKind kind, const Matrix& xs,
                 const std::vector<int>& labels, const TrainConfig& cfg) {
  const int n = xs.rows();
  if (n < 1 || labels.size() != static_cast<std::size_t>(n)) {
    throw InvalidSpecError("training set and labels disagree: " +
                           std::to_string(n) + " rows vs " +
                           std::to_string(labels.size()) + " labels");
  }
  xs.ensure_finite("training features");

  int num_classes = 0;
  for (int label : labels) {
    if (label < 0) throw InvalidSpecError("negative class label");
    num_classes = std::max(num_classes, label + 1);
  }
  if (num_classes < 2) {
    throw InvalidSpecError("training requires at least 2 classes, got " +
                           std::to_string(num_classes));
  }
  std::vector<int> counts(static_cast<std::size_t>(num_classes), 0);
  for (int label : labels) counts[static_cast<std::size_t>(label)]++;
  for (int c = 0; c < num_classes; ++c) {
    if (counts[static_cast<std::size_t>(c)] == 0) {
      throw InvalidSpecError("class " + std::to_string(c) +
                             " has no training samples");
    }
  }

  Matrix features = xs;
  std::vector<double> fmean, fscale;
  if (cfg.standardize) {
    const int f = xs.cols();
    fmean.assign(static_cast<std::size_t>(f), 0.0);
    fscale.assign(static_cast<std::size_t>(f), 1.0);
    for (int i = 0; i < n; ++i) {
      const double* row = xs.row_ptr(i);
      for (int j = 0; j < f; ++j) fmean[static_cast<std::size_t>(j)] += row[j];
    }
    for (int j = 0; j < f; ++j) fmean[static_cast<std::size_t>(j)] /= n;
    std::vector<double> var(static_cast<std::size_t>(f), 0.0);
    for (int i = 0; i < n; ++i) {
      const double* row = xs.row_ptr(i);
      for (int j = 0; j < f; ++j) {
        double d = row[j] - fmean[static_cast<std::size_t>(j)];
        var[static_cast<std::size_t>(j)] += d * d;
      }
    }
    for (int j = 0; j < f; ++j) {
      double s = std::sqrt(var[static_cast<std::size_t>(j)] / n);
      fscale[static_cast<std::size_t>(j)] = s > 1e-12 ? s : 1.0;
    }
    for (int i = 0; i < n; ++i) {
      double* row = features.row_ptr(i);
      for (int j = 0; j < f; ++j) {
        row[j] = (row[j] - fmean[static_cast<std::size_t>(j)]) /
                 fscale[static_cast<std::size_t>(j)];
      }
    }
  }

  std::shared_ptr<const detail::Model> model;
  switch (kind) {
    case ClassifierKind::LinearSvm:
      model = detail::train_linear_svm(features, labels, num_classes, cfg);
      break;
    case ClassifierKind::RandomForest:
      model = detail::train_random_forest(features, labels, num_classes, cfg);
      break;
    case ClassifierKind::LogisticRegression:
      model = detail::train_logistic_regression(features, labels, num_classes, cfg);
      break;
  }
  if (cfg.standardize) {
    auto mutable_model = std::const_pointer_cast<detail::Model>(model);
    mutable_model->feature_mean = std::move(fmean);
    mutable_model->feature_scale = std::move(fscale);
  }

  Classifier c;
  c.model_ = std::move(model);
  return c;
}

double accuracy(const Classifier& c, const Matrix& xs,
                const std::vector<int>& labels) {
  if (labels.size() != static_cast<std::size_t>(xs.rows()) || xs.rows() < 1) {
    throw ShapeError("accuracy needs one label per row (" +
                     std::to_string(xs.rows()) + " rows, " +
                     std::to_string(labels.size()) + " labels)");
  }
  std::vector<int> preds = c.predict(xs);
  int hits = 0;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (preds[i] == labels[i]) ++hits;
  return static_cast<double>(hits) / static_cast<double>(labels.size());
}

}  // namespace drbench
