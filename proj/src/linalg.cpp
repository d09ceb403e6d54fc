#include "gblstsvm/linalg.hpp"

#include <cassert>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include "gblstsvm/simd.hpp"

namespace gblstsvm {

void Matrix::append_row(std::span<const double> r) {
  if (rows_ == 0 && cols_ == 0) cols_ = r.size();
  if (r.size() != cols_) throw std::invalid_argument("Matrix::append_row: width mismatch");
  data_.insert(data_.end(), r.begin(), r.end());
  ++rows_;
}

namespace linalg {

Matrix ata_augmented(const Matrix& x) {
  const std::size_t n = x.cols() + 1;
  Matrix out(n, n);
  std::vector<double> ext(n);
  ext[n - 1] = 1.0;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    std::memcpy(ext.data(), x.row(r), x.cols() * sizeof(double));
    // upper triangle only; mirrored below
    for (std::size_t i = 0; i < n; ++i) {
      simd::axpy(ext[i], ext.data() + i, out.row(i) + i, n - i);
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) out(i, j) = out(j, i);
  return out;
}

Vector weighted_colsum_augmented(const Matrix& x, const Vector& w) {
  if (w.size() != x.rows())
    throw std::invalid_argument("weighted_colsum_augmented: weight length mismatch");
  Vector out(x.cols() + 1, 0.0);
  for (std::size_t r = 0; r < x.rows(); ++r) simd::axpy(w[r], x.row(r), out.data(), x.cols());
  out[x.cols()] = simd::sum(w.data(), w.size());
  return out;
}

Vector matvec(const Matrix& m, const Vector& v) {
  if (v.size() != m.cols()) throw std::invalid_argument("matvec: dimension mismatch");
  Vector out(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) out[i] = simd::dot(m.row(i), v.data(), m.cols());
  return out;
}

bool cholesky_inplace(Matrix& a) {
  assert(a.rows() == a.cols());
  const std::size_t n = a.rows();
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j) - simd::dot(a.row(j), a.row(j), j);
    if (!(d > 0.0)) return false;
    const double ljj = std::sqrt(d);
    a(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      a(i, j) = (a(i, j) - simd::dot(a.row(i), a.row(j), j)) / ljj;
    }
  }
  return true;
}

Vector cholesky_solve(const Matrix& lower, const Vector& rhs) {
  const std::size_t n = lower.rows();
  if (rhs.size() != n) throw std::invalid_argument("cholesky_solve: dimension mismatch");
  Vector y(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = (rhs[i] - simd::dot(lower.row(i), y.data(), i)) / lower(i, i);
  }
  Vector z(n);
  for (std::size_t k = n; k-- > 0;) {
    double acc = y[k];
    for (std::size_t i = k + 1; i < n; ++i) acc -= lower(i, k) * z[i];
    z[k] = acc / lower(k, k);
  }
  return z;
}

double inf_norm(const Vector& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

}  // namespace linalg
}  // namespace gblstsvm
