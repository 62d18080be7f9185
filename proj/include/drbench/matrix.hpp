#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

namespace drbench {

class Vector {
 public:
  Vector() = default;
  explicit Vector(int dim, double fill = 0.0);
  Vector(std::initializer_list<double> values);

  int dim() const { return dim_; }
  double& operator[](int i) { return data_[static_cast<std::size_t>(i)]; }
  double operator[](int i) const { return data_[static_cast<std::size_t>(i)]; }
  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  const std::vector<double>& values() const { return data_; }

  void ensure_finite(const std::string& what) const;

 private:
  int dim_ = 0;
  std::vector<double> data_;
};

// Dense real matrix, row-major. Rows may be zero (empty dataset); columns of
// a non-empty matrix are at least one.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols, double fill = 0.0);
  Matrix(int rows, int cols, std::vector<double> data);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double& operator()(int r, int c) {
    return data_[static_cast<std::size_t>(r) * cols_ + c];
  }
  double operator()(int r, int c) const {
    return data_[static_cast<std::size_t>(r) * cols_ + c];
  }

  double* row_ptr(int r) { return data_.data() + static_cast<std::size_t>(r) * cols_; }
  const double* row_ptr(int r) const {
    return data_.data() + static_cast<std::size_t>(r) * cols_;
  }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  Vector row(int r) const;
  void set_row(int r, const Vector& v);

  std::string shape_str() const;
  void ensure_finite(const std::string& what) const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);
Vector matvec(const Matrix& a, const Vector& x);

double frobenius_norm(const Matrix& a);
double max_abs_diff(const Matrix& a, const Matrix& b);
double max_abs_diff(const Vector& a, const Vector& b);

}  // namespace drbench
