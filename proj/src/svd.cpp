#include "drbench/svd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "drbench/errors.hpp"

namespace drbench {

namespace {

// sqrt(a^2 + b^2) without destructive overflow or underflow.
double pythag(double a, double b) {
  double absa = std::fabs(a);
  double absb = std::fabs(b);
  if (absa > absb) {
    double r = absb / absa;
    return absa * std::sqrt(1.0 + r * r);
  }
  if (absb == 0.0) return 0.0;
  double r = absa / absb;
  return absb * std::sqrt(1.0 + r * r);
}

double sign_like(double a, double b) { return b >= 0.0 ? std::fabs(a) : -std::fabs(a); }

constexpr int kMaxQrIterations = 75;

// Golub-Kahan-Reinsch SVD for m >= n. On return a holds the thin U (m x n),
// w the singular values and v the right singular vectors as columns (n x n).
// Values are unsorted and may carry signs that the wrapper normalizes.
void svd_gkr(Matrix& a, Vector& w, Matrix& v) {
  const int m = a.rows();
  const int n = a.cols();
  std::vector<double> rv1(static_cast<std::size_t>(n), 0.0);

  double g = 0.0, scale = 0.0, anorm = 0.0;
  int l = 0;
  std::vector<double> coeffs(static_cast<std::size_t>(n), 0.0);

  // Householder reduction to bidiagonal form. Column updates are organized
  // as row-streaming passes; per-element accumulation order matches the
  // column-by-column formulation exactly.
  for (int i = 0; i < n; ++i) {
    l = i + 1;
    rv1[i] = scale * g;
    g = scale = 0.0;
    double s = 0.0;
    if (i < m) {
      for (int k = i; k < m; ++k) scale += std::fabs(a(k, i));
      if (scale != 0.0) {
        for (int k = i; k < m; ++k) {
          a(k, i) /= scale;
          s += a(k, i) * a(k, i);
        }
        double f = a(i, i);
        g = -sign_like(std::sqrt(s), f);
        double h = f * g - s;
        a(i, i) = f - g;
        if (l < n) {
          for (int j = l; j < n; ++j) coeffs[static_cast<std::size_t>(j)] = 0.0;
          for (int k = i; k < m; ++k) {
            const double* row = a.row_ptr(k);
            double aki = row[i];
            for (int j = l; j < n; ++j) coeffs[static_cast<std::size_t>(j)] += aki * row[j];
          }
          for (int j = l; j < n; ++j) coeffs[static_cast<std::size_t>(j)] /= h;
          for (int k = i; k < m; ++k) {
            double* row = a.row_ptr(k);
            double aki = row[i];
            for (int j = l; j < n; ++j) row[j] += coeffs[static_cast<std::size_t>(j)] * aki;
          }
        }
        for (int k = i; k < m; ++k) a(k, i) *= scale;
      }
    }
    w[i] = scale * g;
    g = scale = 0.0;
    s = 0.0;
    if (i < m && i != n - 1) {
      for (int k = l; k < n; ++k) scale += std::fabs(a(i, k));
      if (scale != 0.0) {
        for (int k = l; k < n; ++k) {
          a(i, k) /= scale;
          s += a(i, k) * a(i, k);
        }
        double f = a(i, l);
        g = -sign_like(std::sqrt(s), f);
        double h = f * g - s;
        a(i, l) = f - g;
        for (int k = l; k < n; ++k) rv1[k] = a(i, k) / h;
        for (int j = l; j < m; ++j) {
          double acc = 0.0;
          for (int k = l; k < n; ++k) acc += a(j, k) * a(i, k);
          for (int k = l; k < n; ++k) a(j, k) += acc * rv1[k];
        }
        for (int k = l; k < n; ++k) a(i, k) *= scale;
      }
    }
    anorm = std::max(anorm, std::fabs(w[i]) + std::fabs(rv1[i]));
  }

  // Accumulate right-hand transformations into v.
  for (int i = n - 1; i >= 0; --i) {
    if (i < n - 1) {
      if (g != 0.0) {
        for (int j = l; j < n; ++j) v(j, i) = (a(i, j) / a(i, l)) / g;
        for (int j = l; j < n; ++j) coeffs[static_cast<std::size_t>(j)] = 0.0;
        for (int k = l; k < n; ++k) {
          const double* vrow = v.row_ptr(k);
          double aik = a(i, k);
          for (int j = l; j < n; ++j) coeffs[static_cast<std::size_t>(j)] += aik * vrow[j];
        }
        for (int k = l; k < n; ++k) {
          double* vrow = v.row_ptr(k);
          double vki = vrow[i];
          for (int j = l; j < n; ++j) vrow[j] += coeffs[static_cast<std::size_t>(j)] * vki;
        }
      }
      for (int j = l; j < n; ++j) v(i, j) = v(j, i) = 0.0;
    }
    v(i, i) = 1.0;
    g = rv1[i];
    l = i;
  }

  // Accumulate left-hand transformations into a.
  for (int i = std::min(m, n) - 1; i >= 0; --i) {
    l = i + 1;
    g = w[i];
    for (int j = l; j < n; ++j) a(i, j) = 0.0;
    if (g != 0.0) {
      g = 1.0 / g;
      if (l < n) {
        for (int j = l; j < n; ++j) coeffs[static_cast<std::size_t>(j)] = 0.0;
        for (int k = l; k < m; ++k) {
          const double* row = a.row_ptr(k);
          double aki = row[i];
          for (int j = l; j < n; ++j) coeffs[static_cast<std::size_t>(j)] += aki * row[j];
        }
        double pivot = a(i, i);
        for (int j = l; j < n; ++j) {
          coeffs[static_cast<std::size_t>(j)] = (coeffs[static_cast<std::size_t>(j)] / pivot) * g;
        }
        for (int k = i; k < m; ++k) {
          double* row = a.row_ptr(k);
          double aki = row[i];
          for (int j = l; j < n; ++j) row[j] += coeffs[static_cast<std::size_t>(j)] * aki;
        }
      }
      for (int j = i; j < m; ++j) a(j, i) *= g;
    } else {
      for (int j = i; j < m; ++j) a(j, i) = 0.0;
    }
    a(i, i) += 1.0;
  }

  // Diagonalize the bidiagonal form by implicit-shift QR. The rotations act
  // on columns of U and V; work on the transposes so each rotation streams
  // two contiguous rows.
  Matrix ut = transpose(a);
  Matrix vt_work = transpose(v);
  auto rotate_rows = [](Matrix& mat, int ra, int rb, double c, double s) {
    double* pa = mat.row_ptr(ra);
    double* pb = mat.row_ptr(rb);
    const int len = mat.cols();
    for (int j = 0; j < len; ++j) {
      double y = pa[j];
      double z = pb[j];
      pa[j] = y * c + z * s;
      pb[j] = z * c - y * s;
    }
  };

  for (int k = n - 1; k >= 0; --k) {
    for (int its = 1; its <= kMaxQrIterations; ++its) {
      bool flag = true;
      int nm = 0;
      l = k;
      for (; l >= 0; --l) {
        nm = l - 1;
        if (std::fabs(rv1[l]) + anorm == anorm) {
          flag = false;
          break;
        }
        if (std::fabs(w[nm]) + anorm == anorm) break;
      }
      if (flag) {
        // Cancel rv1[l] when w[l-1] is negligible.
        double c = 0.0;
        double s = 1.0;
        for (int i = l; i <= k; ++i) {
          double f = s * rv1[i];
          rv1[i] = c * rv1[i];
          if (std::fabs(f) + anorm == anorm) break;
          g = w[i];
          double h = pythag(f, g);
          w[i] = h;
          h = 1.0 / h;
          c = g * h;
          s = -f * h;
          rotate_rows(ut, nm, i, c, s);
        }
      }
      double z = w[k];
      if (l == k) {
        if (z < 0.0) {
          w[k] = -z;
          double* row = vt_work.row_ptr(k);
          for (int j = 0; j < n; ++j) row[j] = -row[j];
        }
        break;
      }
      if (its == kMaxQrIterations) {
        throw NumericalError("svd failed to converge for " + std::to_string(m) +
                             "x" + std::to_string(n) + " matrix after " +
                             std::to_string(kMaxQrIterations) + " iterations");
      }
      double x = w[l];
      nm = k - 1;
      double y = w[nm];
      g = rv1[nm];
      double h = rv1[k];
      double f = ((y - z) * (y + z) + (g - h) * (g + h)) / (2.0 * h * y);
      g = pythag(f, 1.0);
      f = ((x - z) * (x + z) + h * ((y / (f + sign_like(g, f))) - h)) / x;
      double c = 1.0;
      double s = 1.0;
      for (int j = l; j <= nm; ++j) {
        int i = j + 1;
        g = rv1[i];
        y = w[i];
        h = s * g;
        g = c * g;
        z = pythag(f, h);
        rv1[j] = z;
        c = f / z;
        s = h / z;
        f = x * c + g * s;
        g = g * c - x * s;
        h = y * s;
        y *= c;
        rotate_rows(vt_work, j, i, c, s);
        z = pythag(f, h);
        w[j] = z;
        if (z != 0.0) {
          z = 1.0 / z;
          c = f * z;
          s = h * z;
        }
        f = c * g + s * y;
        x = c * y - s * g;
        rotate_rows(ut, j, i, c, s);
      }
      rv1[l] = 0.0;
      rv1[k] = f;
      w[k] = x;
    }
  }

  a = transpose(ut);
  v = transpose(vt_work);
}

// Thin Householder QR for m >= n: a = q * r with q m x n (orthonormal
// columns) and r n x n upper triangular. Works on the transpose so every
// reflector application streams contiguous memory.
void householder_qr_thin(const Matrix& a, Matrix& q, Matrix& r) {
  const int m = a.rows();
  const int n = a.cols();
  Matrix work = transpose(a);  // n x m; column c of a is row c of work
  std::vector<std::vector<double>> reflectors(static_cast<std::size_t>(n));
  std::vector<double> vnorm2s(static_cast<std::size_t>(n), 0.0);

  for (int j = 0; j < n; ++j) {
    double* col_j = work.row_ptr(j);
    double norm = 0.0;
    for (int i = j; i < m; ++i) norm += col_j[i] * col_j[i];
    norm = std::sqrt(norm);
    auto& vvec = reflectors[static_cast<std::size_t>(j)];
    vvec.assign(static_cast<std::size_t>(m - j), 0.0);
    if (norm != 0.0) {
      double alpha = col_j[j] >= 0.0 ? -norm : norm;
      for (int i = j; i < m; ++i) vvec[static_cast<std::size_t>(i - j)] = col_j[i];
      vvec[0] -= alpha;
      double vnorm2 = 0.0;
      for (double v : vvec) vnorm2 += v * v;
      vnorm2s[static_cast<std::size_t>(j)] = vnorm2;
      if (vnorm2 > 0.0) {
        for (int c = j; c < n; ++c) {
          double* col_c = work.row_ptr(c);
          double dot = 0.0;
          for (int i = j; i < m; ++i) dot += vvec[static_cast<std::size_t>(i - j)] * col_c[i];
          double coef = 2.0 * dot / vnorm2;
          for (int i = j; i < m; ++i) col_c[i] -= coef * vvec[static_cast<std::size_t>(i - j)];
        }
      }
    }
  }

  r = Matrix(n, n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) r(i, j) = work(j, i);

  // Apply the reflectors to the first n columns of I, held transposed.
  Matrix qt(n, m, 0.0);
  for (int j = 0; j < n; ++j) qt(j, j) = 1.0;
  for (int j = n - 1; j >= 0; --j) {
    const auto& vvec = reflectors[static_cast<std::size_t>(j)];
    double vnorm2 = vnorm2s[static_cast<std::size_t>(j)];
    if (vnorm2 == 0.0) continue;
    for (int c = 0; c < n; ++c) {
      double* col_c = qt.row_ptr(c);
      double dot = 0.0;
      for (int i = j; i < m; ++i) dot += vvec[static_cast<std::size_t>(i - j)] * col_c[i];
      double coef = 2.0 * dot / vnorm2;
      for (int i = j; i < m; ++i) col_c[i] -= coef * vvec[static_cast<std::size_t>(i - j)];
    }
  }
  q = transpose(qt);
}

void apply_sign_convention(Matrix& u, Matrix& vt) {
  const int r = u.cols();
  for (int j = 0; j < r; ++j) {
    double mx = 0.0;
    for (int i = 0; i < u.rows(); ++i) mx = std::max(mx, std::fabs(u(i, j)));
    if (mx == 0.0) continue;
    int pivot = 0;
    for (int i = 0; i < u.rows(); ++i) {
      if (std::fabs(u(i, j)) > 1e-8 * mx) {
        pivot = i;
        break;
      }
    }
    if (u(pivot, j) < 0.0) {
      for (int i = 0; i < u.rows(); ++i) u(i, j) = -u(i, j);
      for (int c = 0; c < vt.cols(); ++c) vt(j, c) = -vt(j, c);
    }
  }
}

SvdResult svd_tall(const Matrix& a) {
  const int m = a.rows();
  const int n = a.cols();

  // QR pre-reduction keeps the iterative part at n x n for tall inputs.
  if (m > n + n / 8 && n > 1) {
    Matrix q, r;
    householder_qr_thin(a, q, r);
    SvdResult inner = svd_tall(r);
    SvdResult out;
    out.u = matmul(q, inner.u);
    out.singular_values = std::move(inner.singular_values);
    out.vt = std::move(inner.vt);
    return out;
  }

  Matrix u = a;
  Vector w(n);
  Matrix v(n, n, 0.0);
  svd_gkr(u, w, v);

  // Sort non-increasing; ties keep the original column order.
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int x, int y) { return w[x] > w[y]; });

  SvdResult out;
  out.u = Matrix(m, n);
  out.singular_values = Vector(n);
  out.vt = Matrix(n, n);
  for (int j = 0; j < n; ++j) {
    int src = order[static_cast<std::size_t>(j)];
    out.singular_values[j] = w[src];
    for (int i = 0; i < m; ++i) out.u(i, j) = u(i, src);
    for (int i = 0; i < n; ++i) out.vt(j, i) = v(i, src);
  }
  return out;
}

}  // namespace

SvdResult svd(const Matrix& a) {
  if (a.rows() < 1 || a.cols() < 1) {
    throw ShapeError("svd requires a non-empty matrix, got " + a.shape_str());
  }
  a.ensure_finite("svd input");

  SvdResult out;
  if (a.rows() >= a.cols()) {
    out = svd_tall(a);
  } else {
    SvdResult t = svd_tall(transpose(a));
    out.u = transpose(t.vt);
    out.singular_values = std::move(t.singular_values);
    out.vt = transpose(t.u);
  }
  apply_sign_convention(out.u, out.vt);
  return out;
}

Matrix pseudo_inverse(const Matrix& a, double rank_tol) {
  SvdResult dec = svd(a);
  const int r = dec.singular_values.dim();
  double smax = r > 0 ? dec.singular_values[0] : 0.0;
  double tol = rank_tol >= 0.0
                   ? rank_tol
                   : std::max(a.rows(), a.cols()) *
                         std::numeric_limits<double>::epsilon() * smax;

  // pinv = v * diag(1/s) * u^T, dropping values at or below the tolerance.
  Matrix vs = transpose(dec.vt);  // cols x r
  for (int j = 0; j < r; ++j) {
    double s = dec.singular_values[j];
    double inv = (s > tol && s > 0.0) ? 1.0 / s : 0.0;
    for (int i = 0; i < vs.rows(); ++i) vs(i, j) *= inv;
  }
  return matmul(vs, transpose(dec.u));
}

Matrix solve_least_squares(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) {
    throw ShapeError("least squares row mismatch: " + a.shape_str() + " vs " +
                     b.shape_str());
  }
  if (a.rows() < 1 || a.cols() < 1 || b.cols() < 1) {
    throw ShapeError("least squares requires non-empty operands");
  }
  b.ensure_finite("least squares rhs");

  SvdResult dec = svd(a);
  const int r = dec.singular_values.dim();
  double smax = r > 0 ? dec.singular_values[0] : 0.0;
  double tol = std::max(a.rows(), a.cols()) *
               std::numeric_limits<double>::epsilon() * smax;

  Matrix t = matmul(transpose(dec.u), b);  // r x q
  for (int i = 0; i < r; ++i) {
    double s = dec.singular_values[i];
    double inv = (s > tol && s > 0.0) ? 1.0 / s : 0.0;
    for (int j = 0; j < t.cols(); ++j) t(i, j) *= inv;
  }
  return matmul(transpose(dec.vt), t);
}

}  // namespace drbench
