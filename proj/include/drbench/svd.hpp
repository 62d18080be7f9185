#pragma once

#include "drbench/matrix.hpp"

namespace drbench {

// Thin decomposition a = u * diag(s) * vt with r = min(rows, cols):
// u is rows x r with orthonormal columns, vt is r x cols with orthonormal
// rows, singular values sorted non-increasing. Deterministic: the first
// nonzero entry of every column of u is non-negative.
struct SvdResult {
  Matrix u;
  Vector singular_values;
  Matrix vt;
};

SvdResult svd(const Matrix& a);

// Moore-Penrose pseudo-inverse. Singular values at or below rank_tol are
// treated as zero; rank_tol < 0 selects max(rows, cols) * eps * s_max.
Matrix pseudo_inverse(const Matrix& a, double rank_tol = -1.0);

// Minimum-norm X for min ||a*X - b||_F, i.e. pinv(a) * b.
Matrix solve_least_squares(const Matrix& a, const Matrix& b);

}  // namespace drbench
