#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "gblstsvm/kernel.hpp"
#include "gblstsvm/rng.hpp"

using namespace gblstsvm;

namespace {

Matrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols, double scale = 1.0) {
  Matrix m(rows, cols);
  for (double& v : m.data()) v = scale * rng.normal();
  return m;
}

}  // namespace

TEST_CASE("kernel_value fixtures") {
  const Vector x = {0.0, 0.0};
  const Vector y = {1.0, 0.0};
  const KernelSpec g = KernelSpec::gaussian(1.0);
  CHECK(kernel_value(x, x, g) == doctest::Approx(1.0));
  CHECK(kernel_value(x, y, g) == doctest::Approx(0.606531).epsilon(1e-6));

  const Vector a = {1.0, 2.0};
  const Vector b = {3.0, 4.0};
  CHECK(kernel_value(a, b, KernelSpec::linear()) == doctest::Approx(11.0));

  CHECK_THROWS(kernel_value(Vector{1.0}, Vector{1.0, 2.0}, g));
  CHECK_THROWS(KernelSpec::gaussian(0.0).validate());
}

TEST_CASE("gaussian gram of two points matches entrywise evaluation") {
  Matrix x(2, 2);
  x(1, 0) = 1.0;
  const Matrix k = gram(x, x, KernelSpec::gaussian(1.0));
  CHECK(k(0, 0) == doctest::Approx(1.0));
  CHECK(k(1, 1) == doctest::Approx(1.0));
  CHECK(k(0, 1) == doctest::Approx(std::exp(-0.5)));
  CHECK(k(1, 0) == doctest::Approx(std::exp(-0.5)));
}

TEST_CASE("linear gram equals X Y'") {
  Rng rng(5);
  const Matrix x = random_matrix(rng, 7, 4);
  const Matrix y = random_matrix(rng, 5, 4);
  const Matrix k = gram(x, y, KernelSpec::linear());
  for (std::size_t i = 0; i < 7; ++i)
    for (std::size_t j = 0; j < 5; ++j) {
      double dot = 0.0;
      for (std::size_t c = 0; c < 4; ++c) dot += x(i, c) * y(j, c);
      CHECK(k(i, j) == doctest::Approx(dot).epsilon(1e-12));
    }
  CHECK_THROWS(gram(x, random_matrix(rng, 3, 5), KernelSpec::linear()));
}

TEST_CASE("gram matches scalar kernel_value entrywise") {
  Rng rng(6);
  const Matrix x = random_matrix(rng, 9, 3);
  const Matrix y = random_matrix(rng, 6, 3);
  const KernelSpec g = KernelSpec::gaussian(0.7);
  const Matrix k = gram(x, y, g);
  for (std::size_t i = 0; i < 9; ++i)
    for (std::size_t j = 0; j < 6; ++j)
      CHECK(k(i, j) == doctest::Approx(kernel_value(x.row_span(i), y.row_span(j), g))
                           .epsilon(1e-12));
}

TEST_CASE("gram symmetry and transpose identity properties") {
  Rng rng(7);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t n = 2 + rng.uniform_index(20);
    const std::size_t dim = 1 + rng.uniform_index(6);
    const KernelSpec spec = rep % 2 ? KernelSpec::gaussian(rng.uniform(0.1, 4.0))
                                    : KernelSpec::linear();
    const Matrix x = random_matrix(rng, n, dim, 2.0);
    const Matrix k = gram(x, x, spec);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) CHECK(std::fabs(k(i, j) - k(j, i)) <= 1e-12);

    const Matrix y = random_matrix(rng, 3 + rng.uniform_index(10), dim, 2.0);
    const Matrix kxy = gram(x, y, spec);
    const Matrix kyx = gram(y, x, spec);
    for (std::size_t i = 0; i < kxy.rows(); ++i)
      for (std::size_t j = 0; j < kxy.cols(); ++j)
        CHECK(std::fabs(kxy(i, j) - kyx(j, i)) <= 1e-12);
  }
}

TEST_CASE("gaussian gram is positive semidefinite up to 200x200") {
  Rng rng(8);
  for (int rep = 0; rep < 6; ++rep) {
    const std::size_t n = 50 + rng.uniform_index(151);
    const Matrix x = random_matrix(rng, n, 1 + rng.uniform_index(8), 3.0);
    const Matrix k = gram(x, x, KernelSpec::gaussian(rng.uniform(0.2, 3.0)));
    Eigen::MatrixXd ke(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) ke(i, j) = k(i, j);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ke, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() >= -1e-8);
    CHECK(ke.diagonal().minCoeff() == doctest::Approx(1.0));
  }
}
