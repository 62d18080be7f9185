#include "drbench/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "drbench/errors.hpp"

namespace drbench {

double mse(const Matrix& x, const Matrix& x_prime) {
  if (x.rows() != x_prime.rows() || x.cols() != x_prime.cols()) {
    throw ShapeError("mse shape mismatch: " + x.shape_str() + " vs " +
                     x_prime.shape_str());
  }
  const std::size_t count = x.data().size();
  if (count == 0) throw ShapeError("mse of empty matrices is undefined");

  // Neumaier compensated summation.
  double sum = 0.0;
  double compensation = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    double d = x.data()[i] - x_prime.data()[i];
    double term = d * d;
    double t = sum + term;
    if (std::fabs(sum) >= std::fabs(term)) {
      compensation += (sum - t) + term;
    } else {
      compensation += (term - t) + sum;
    }
    sum = t;
  }
  return (sum + compensation) / static_cast<double>(count);
}

double arr(double acc_original, double acc_reconstructed) {
  if (acc_original < 0.0 || acc_original > 1.0 || acc_reconstructed < 0.0 ||
      acc_reconstructed > 1.0) {
    throw InvalidSpecError("accuracies must lie in [0, 1]");
  }
  if (acc_original == 0.0) {
    throw MetricError("arr undefined: acc_original is 0");
  }
  return (acc_original - acc_reconstructed) / acc_original;
}

RobustnessReport evaluate_attack(const Matrix& targets,
                                 const std::vector<int>& labels,
                                 const ProjectionMatrix& pm,
                                 const ReconstructionMatrix& rm,
                                 const Classifier& theta,
                                 const EvalOptions& opts) {
  if (labels.size() != static_cast<std::size_t>(targets.rows())) {
    throw ShapeError("one label per target row required");
  }
  if (theta.input_dim() != targets.cols()) {
    throw ShapeError("theta expects " + std::to_string(theta.input_dim()) +
                     " features, targets have " + std::to_string(targets.cols()));
  }

  Matrix ys = project_dataset(pm, targets);
  Matrix reconstructed = reconstruct(rm, ys);
  if (opts.clip_reconstruction) {
    for (double& v : reconstructed.data()) v = std::clamp(v, 0.0, 1.0);
  }

  RobustnessReport report;
  report.method = method_name(pm.spec.method);
  report.k = pm.spec.k;
  report.attack = attack_kind_name(rm.kind);
  if (rm.kind == AttackKind::Regression && !rm.attacker_dataset_id.empty()) {
    report.attack += ":" + rm.attacker_dataset_id;
  }
  report.mse = mse(targets, reconstructed);
  report.acc_original = accuracy(theta, targets, labels);
  report.acc_reconstructed = accuracy(theta, reconstructed, labels);
  try {
    report.arr = arr(report.acc_original, report.acc_reconstructed);
  } catch (const MetricError&) {
    report.arr.reset();
    report.status = "arr_undefined:acc_original=0";
  }
  return report;
}

}  // namespace drbench
