#pragma once

#include <cstddef>
#include <stdexcept>

namespace gblstsvm {

/// One point in hyperparameter space. c3/c4 only matter for the
/// regularized dual variant; pur/num only for the granular variants; sigma
/// only for the Gaussian kernel.
struct HyperParams {
  double c1 = 1.0;
  double c2 = 1.0;
  double c3 = 1.0;
  double c4 = 1.0;
  double sigma = 1.0;
  double pur = 0.95;
  std::size_t num = 2;

  void validate() const {
    if (!(c1 > 0 && c2 > 0 && c3 > 0 && c4 > 0)) throw std::invalid_argument("hyperparams: c must be positive");
    if (!(sigma > 0)) throw std::invalid_argument("hyperparams: sigma must be positive");
    if (!(pur > 0.5 && pur <= 1.0)) throw std::invalid_argument("hyperparams: pur must be in (0.5, 1]");
    if (num < 2) throw std::invalid_argument("hyperparams: num must be >= 2");
  }
};

}  // namespace gblstsvm
