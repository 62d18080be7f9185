#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "drbench/attack.hpp"
#include "drbench/classify.hpp"
#include "drbench/matrix.hpp"
#include "drbench/reduction.hpp"

namespace drbench {

// One (method, K, attack) evaluation row.
struct RobustnessReport {
  std::string method;
  int k = 0;
  std::string attack;
  double mse = 0.0;
  std::optional<double> arr;   // empty when acc_original is 0
  double acc_original = 0.0;
  double acc_reconstructed = 0.0;
  std::uint64_t seed = 0;           // filled by the harness
  std::string config_digest;        // filled by the harness
  std::string status = "ok";
};

// Mean squared error with compensated (Neumaier) summation.
double mse(const Matrix& x, const Matrix& x_prime);

// (acc_original - acc_reconstructed) / acc_original. Values in [0,1]
// required; acc_original must be positive, otherwise the metric is
// undefined and a MetricError is thrown (never reported as 0).
double arr(double acc_original, double acc_reconstructed);

struct EvalOptions {
  bool clip_reconstruction = false;  // clamp x' to [0,1] before the metrics
};

// Projects the targets through pm, reconstructs via rm and scores both MSE
// and ARR against the reference classifier theta (trained on original-space
// features).
RobustnessReport evaluate_attack(const Matrix& targets,
                                 const std::vector<int>& labels,
                                 const ProjectionMatrix& pm,
                                 const ReconstructionMatrix& rm,
                                 const Classifier& theta,
                                 const EvalOptions& opts = {});

}  // namespace drbench
