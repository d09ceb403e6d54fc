#include "gblstsvm/kernel.hpp"

#include <cmath>
#include <stdexcept>

#include "gblstsvm/simd.hpp"

namespace gblstsvm {

void KernelSpec::validate() const {
  if (kind == KernelKind::gaussian && !(sigma > 0.0))
    throw std::invalid_argument("kernel: gaussian sigma must be positive");
}

double kernel_value(std::span<const double> x, std::span<const double> y,
                    const KernelSpec& spec) {
  if (x.size() != y.size()) throw std::invalid_argument("kernel_value: dimension mismatch");
  spec.validate();
  if (spec.kind == KernelKind::linear) return simd::dot(x.data(), y.data(), x.size());
  const double d2 = simd::squared_distance(x.data(), y.data(), x.size());
  return std::exp(-d2 / (2.0 * spec.sigma * spec.sigma));
}

Matrix gram(const Matrix& x, const Matrix& y, const KernelSpec& spec) {
  if (x.cols() != y.cols()) throw std::invalid_argument("gram: feature dimension mismatch");
  spec.validate();
  const std::size_t n = x.cols();
  Matrix out(x.rows(), y.rows());

  if (spec.kind == KernelKind::linear) {
    for (std::size_t i = 0; i < x.rows(); ++i)
      for (std::size_t j = 0; j < y.rows(); ++j) out(i, j) = simd::dot(x.row(i), y.row(j), n);
    return out;
  }

  // |x-y|^2 = |x|^2 + |y|^2 - 2 x.y, clamped at 0 so round-off cannot leak
  // through the exponential
  Vector xn(x.rows()), yn(y.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) xn[i] = simd::dot(x.row(i), x.row(i), n);
  for (std::size_t j = 0; j < y.rows(); ++j) yn[j] = simd::dot(y.row(j), y.row(j), n);
  const double inv = 1.0 / (2.0 * spec.sigma * spec.sigma);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < y.rows(); ++j) {
      const double d2 = std::max(0.0, xn[i] + yn[j] - 2.0 * simd::dot(x.row(i), y.row(j), n));
      out(i, j) = std::exp(-d2 * inv);
    }
  }
  return out;
}

}  // namespace gblstsvm
