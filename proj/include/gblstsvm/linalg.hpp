#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace gblstsvm {

using Vector = std::vector<double>;

/// Dense row-major matrix. Rows are contiguous so the simd kernels can run
/// straight over them.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  double* row(std::size_t i) { return data_.data() + i * cols_; }
  const double* row(std::size_t i) const { return data_.data() + i * cols_; }
  std::span<const double> row_span(std::size_t i) const { return {row(i), cols_}; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  void append_row(std::span<const double> r);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

namespace linalg {

/// X^T X of the row-augmented matrix [X 1]; result is (cols+1) x (cols+1).
Matrix ata_augmented(const Matrix& x);

/// [X^T w ; sum(w)] for per-row weights w; length cols+1.
Vector weighted_colsum_augmented(const Matrix& x, const Vector& w);

/// y = M v
Vector matvec(const Matrix& m, const Vector& v);

/// In-place lower Cholesky of a symmetric matrix (upper triangle ignored).
/// Returns false on a non-positive pivot.
bool cholesky_inplace(Matrix& a);

/// Solve L L^T z = rhs given the lower factor.
Vector cholesky_solve(const Matrix& lower, const Vector& rhs);

double inf_norm(const Vector& v);

}  // namespace linalg
}  // namespace gblstsvm
