#pragma once

#include <span>

#include "gblstsvm/linalg.hpp"

namespace gblstsvm {

enum class KernelKind { linear, gaussian };

struct KernelSpec {
  KernelKind kind = KernelKind::linear;
  double sigma = 1.0;  // Gaussian width; unused for linear

  static KernelSpec linear() { return {KernelKind::linear, 1.0}; }
  static KernelSpec gaussian(double sigma) { return {KernelKind::gaussian, sigma}; }

  void validate() const;
};

/// linear: x.y; gaussian: exp(-|x-y|^2 / (2 sigma^2))
double kernel_value(std::span<const double> x, std::span<const double> y, const KernelSpec& spec);

/// p x q matrix with entry (i,j) = kernel_value(X_i, Y_j).
Matrix gram(const Matrix& x, const Matrix& y, const KernelSpec& spec);

}  // namespace gblstsvm
