#include "drbench/attack.hpp"

#include <cmath>

#include "drbench/errors.hpp"
#include "drbench/svd.hpp"

namespace drbench {

std::string attack_kind_name(AttackKind kind) {
  return kind == AttackKind::PInv ? "pinv" : "regression";
}

ReconstructionMatrix attack_pinv(const ProjectionMatrix& pm) {
  ReconstructionMatrix rm;
  rm.q = pseudo_inverse(pm.p);
  rm.kind = AttackKind::PInv;
  rm.mean = pm.mean;
  return rm;
}

ReconstructionMatrix attack_regression(const ProjectionMatrix& pm,
                                       const Matrix& x_attack,
                                       const RegressionOptions& opts) {
  if (x_attack.cols() != pm.spec.d) {
    throw ShapeError("attacker dataset has " + std::to_string(x_attack.cols()) +
                     " columns, projection expects " + std::to_string(pm.spec.d));
  }
  if (x_attack.rows() < 1) {
    throw InvalidSpecError("regression attack requires a non-empty attacker dataset");
  }

  Matrix y_attack = project_dataset(pm, x_attack);  // m x k
  double ynorm = frobenius_norm(y_attack);
  if (ynorm == 0.0) {
    throw NumericalError("degenerate attacker projections (all zero) for " +
                         y_attack.shape_str());
  }

  // Fit X ~ Q y columnwise: solve min ||Y W - X||_F with W = Q^T.
  Matrix targets = x_attack;
  if (pm.mean) {
    for (int i = 0; i < targets.rows(); ++i) {
      double* row = targets.row_ptr(i);
      for (int j = 0; j < targets.cols(); ++j) row[j] -= (*pm.mean)[j];
    }
  }

  Matrix design = y_attack;
  if (opts.intercept) {
    design = Matrix(y_attack.rows(), y_attack.cols() + 1);
    for (int i = 0; i < y_attack.rows(); ++i) {
      const double* src = y_attack.row_ptr(i);
      double* dst = design.row_ptr(i);
      for (int j = 0; j < y_attack.cols(); ++j) dst[j] = src[j];
      dst[y_attack.cols()] = 1.0;
    }
  }

  Matrix w = solve_least_squares(design, targets);  // (k[+1]) x d

  ReconstructionMatrix rm;
  rm.kind = AttackKind::Regression;
  rm.attacker_dataset_id = opts.attacker_dataset_id;
  rm.attacker_type = opts.attacker_type;
  rm.mean = pm.mean;
  rm.q = Matrix(pm.spec.d, pm.spec.k);
  for (int i = 0; i < pm.spec.k; ++i)
    for (int j = 0; j < pm.spec.d; ++j) rm.q(j, i) = w(i, j);
  if (opts.intercept) {
    Vector b(pm.spec.d);
    for (int j = 0; j < pm.spec.d; ++j) b[j] = w(pm.spec.k, j);
    rm.intercept = b;
  }
  return rm;
}

Matrix reconstruct(const ReconstructionMatrix& rm, const Matrix& ys) {
  if (ys.cols() != rm.q.cols()) {
    throw ShapeError("reduced dataset has " + std::to_string(ys.cols()) +
                     " columns, reconstruction expects " +
                     std::to_string(rm.q.cols()));
  }
  // x' = Q y per row: out = ys * Q^T, then optional intercept and mean.
  Matrix out = matmul(ys, transpose(rm.q));
  if (rm.intercept || rm.mean) {
    for (int i = 0; i < out.rows(); ++i) {
      double* row = out.row_ptr(i);
      if (rm.intercept)
        for (int j = 0; j < out.cols(); ++j) row[j] += (*rm.intercept)[j];
      if (rm.mean)
        for (int j = 0; j < out.cols(); ++j) row[j] += (*rm.mean)[j];
    }
  }
  return out;
}

}  // namespace drbench
