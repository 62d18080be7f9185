#include "drbench/matrix.hpp"

#include <cmath>
#include <stdexcept>

#include "drbench/errors.hpp"

namespace drbench {

Vector::Vector(int dim, double fill) : dim_(dim) {
  if (dim < 0) throw ShapeError("vector dimension must be non-negative");
  data_.assign(static_cast<std::size_t>(dim), fill);
}

Vector::Vector(std::initializer_list<double> values)
    : dim_(static_cast<int>(values.size())), data_(values) {}

void Vector::ensure_finite(const std::string& what) const {
  for (double v : data_) {
    if (!std::isfinite(v)) {
      throw NumericalError("non-finite entry in " + what);
    }
  }
}

Matrix::Matrix(int rows, int cols, double fill) : rows_(rows), cols_(cols) {
  if (rows < 0 || cols < 0 || (rows > 0 && cols == 0)) {
    throw ShapeError("invalid matrix shape " + std::to_string(rows) + "x" +
                     std::to_string(cols));
  }
  data_.assign(static_cast<std::size_t>(rows) * cols, fill);
}

Matrix::Matrix(int rows, int cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (rows < 0 || cols < 0 ||
      data_.size() != static_cast<std::size_t>(rows) * cols) {
    throw ShapeError("data length does not match shape " + shape_str());
  }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = static_cast<int>(rows.size());
  cols_ = rows_ > 0 ? static_cast<int>(rows.begin()->size()) : 0;
  data_.reserve(static_cast<std::size_t>(rows_) * cols_);
  for (const auto& r : rows) {
    if (static_cast<int>(r.size()) != cols_) {
      throw ShapeError("ragged initializer for matrix");
    }
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Vector Matrix::row(int r) const {
  Vector v(cols_);
  const double* src = row_ptr(r);
  for (int c = 0; c < cols_; ++c) v[c] = src[c];
  return v;
}

void Matrix::set_row(int r, const Vector& v) {
  if (v.dim() != cols_) {
    throw ShapeError("row of dim " + std::to_string(v.dim()) +
                     " does not fit matrix " + shape_str());
  }
  double* dst = row_ptr(r);
  for (int c = 0; c < cols_; ++c) dst[c] = v[c];
}

std::string Matrix::shape_str() const {
  return std::to_string(rows_) + "x" + std::to_string(cols_);
}

void Matrix::ensure_finite(const std::string& what) const {
  for (double v : data_) {
    if (!std::isfinite(v)) {
      throw NumericalError("non-finite entry in " + what + " (" + shape_str() + ")");
    }
  }
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("cannot multiply " + a.shape_str() + " by " + b.shape_str());
  }
  Matrix out(a.rows(), b.cols(), 0.0);
  const int n = a.cols();
  // i-k-j order keeps both inner streams contiguous in row-major storage.
  for (int i = 0; i < a.rows(); ++i) {
    const double* arow = a.row_ptr(i);
    double* orow = out.row_ptr(i);
    for (int k = 0; k < n; ++k) {
      const double aik = arow[k];
      if (aik == 0.0) continue;
      const double* brow = b.row_ptr(k);
      for (int j = 0; j < b.cols(); ++j) orow[j] += aik * brow[j];
    }
  }
  return out;
}

Matrix transpose(const Matrix& a) {
  Matrix out(a.cols(), a.rows());
  for (int i = 0; i < a.rows(); ++i) {
    const double* arow = a.row_ptr(i);
    for (int j = 0; j < a.cols(); ++j) out(j, i) = arow[j];
  }
  return out;
}

Vector matvec(const Matrix& a, const Vector& x) {
  if (a.cols() != x.dim()) {
    throw ShapeError("cannot apply " + a.shape_str() + " to vector of dim " +
                     std::to_string(x.dim()));
  }
  Vector y(a.rows());
  for (int i = 0; i < a.rows(); ++i) {
    const double* arow = a.row_ptr(i);
    double acc = 0.0;
    for (int j = 0; j < a.cols(); ++j) acc += arow[j] * x[j];
    y[i] = acc;
  }
  return y;
}

double frobenius_norm(const Matrix& a) {
  double acc = 0.0;
  for (double v : a.data()) acc += v * v;
  return std::sqrt(acc);
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError("shape mismatch " + a.shape_str() + " vs " + b.shape_str());
  }
  double m = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    m = std::max(m, std::fabs(a.data()[i] - b.data()[i]));
  }
  return m;
}

double max_abs_diff(const Vector& a, const Vector& b) {
  if (a.dim() != b.dim()) {
    throw ShapeError("vector dim mismatch " + std::to_string(a.dim()) + " vs " +
                     std::to_string(b.dim()));
  }
  double m = 0.0;
  for (int i = 0; i < a.dim(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

}  // namespace drbench
