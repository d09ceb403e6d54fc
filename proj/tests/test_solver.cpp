#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "gblstsvm/rng.hpp"
#include "gblstsvm/solver.hpp"

using namespace gblstsvm;

namespace {

/// Random PD matrix with smallest eigenvalue bounded away from zero.
QpProblem random_pd_problem(Rng& rng, std::size_t n) {
  Matrix a(n + 2, n);
  for (double& v : a.data()) v = rng.normal();
  QpProblem p;
  p.q = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t r = 0; r < a.rows(); ++r) acc += a(r, i) * a(r, j);
      p.q(i, j) = acc / double(n);
    }
  for (std::size_t i = 0; i < n; ++i) p.q(i, i) += 0.5;
  p.b.resize(n);
  for (double& v : p.b) v = rng.normal();
  return p;
}

Eigen::VectorXd direct_solve(const QpProblem& p) {
  const std::size_t n = p.q.rows();
  Eigen::MatrixXd qe(n, n);
  Eigen::VectorXd be(n);
  for (std::size_t i = 0; i < n; ++i) {
    be(i) = p.b[i];
    for (std::size_t j = 0; j < n; ++j) qe(i, j) = p.q(i, j);
  }
  return qe.ldlt().solve(-be);
}

}  // namespace

TEST_CASE("diagonal qp has the closed-form answer") {
  QpProblem p;
  p.q = Matrix(2, 2);
  p.q(0, 0) = p.q(1, 1) = 2.0;
  p.b = {-2.0, 4.0};
  const QpResult r = qp_coordinate_ascent(p);
  CHECK(r.converged);
  CHECK(r.z[0] == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(r.z[1] == doctest::Approx(-2.0).epsilon(1e-8));
}

TEST_CASE("2x2 coupled qp solves Qz = -b") {
  QpProblem p;
  p.q = Matrix(2, 2);
  p.q(0, 0) = p.q(1, 1) = 2.0;
  p.q(0, 1) = p.q(1, 0) = 1.0;
  p.b = {-3.0, -3.0};
  const QpResult r = qp_coordinate_ascent(p);
  CHECK(r.converged);
  CHECK(r.z[0] == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(r.z[1] == doctest::Approx(1.0).epsilon(1e-8));
  const Eigen::VectorXd ref = direct_solve(p);
  CHECK(ref(0) == doctest::Approx(1.0));
  CHECK(ref(1) == doctest::Approx(1.0));
}

TEST_CASE("coordinate ascent agrees with a direct factorization on n=50") {
  Rng rng(3);
  const QpProblem p = random_pd_problem(rng, 50);
  const QpResult r = qp_coordinate_ascent(p);
  REQUIRE(r.converged);
  const Eigen::VectorXd ref = direct_solve(p);
  for (std::size_t i = 0; i < 50; ++i) CHECK(std::fabs(r.z[i] - ref(i)) <= 1e-6);
  CHECK(r.grad_inf_norm <= 1e-8);
}

TEST_CASE("objective decreases monotonically sweep by sweep") {
  Rng rng(4);
  for (int rep = 0; rep < 20; ++rep) {
    const QpProblem p = random_pd_problem(rng, 5 + rng.uniform_index(60));
    const QpResult r = qp_coordinate_ascent(p);
    REQUIRE(!r.objective_trace.empty());
    for (std::size_t s = 1; s < r.objective_trace.size(); ++s)
      CHECK(r.objective_trace[s] <= r.objective_trace[s - 1] + 1e-12);
  }
}

TEST_CASE("distance to the direct solution is bounded by the tolerance") {
  Rng rng(5);
  for (int rep = 0; rep < 20; ++rep) {
    const QpProblem p = random_pd_problem(rng, 3 + rng.uniform_index(40));
    SolverConfig cfg;
    cfg.tolerance = 1e-9;
    const QpResult r = qp_coordinate_ascent(p, cfg);
    REQUIRE(r.converged);
    const Eigen::VectorXd ref = direct_solve(p);
    for (std::size_t i = 0; i < r.z.size(); ++i)
      CHECK(std::fabs(r.z[i] - ref(i)) <= 10 * 1e-6);
  }
}

TEST_CASE("max_sweeps exhaustion returns the best iterate with a flag") {
  Rng rng(6);
  const QpProblem p = random_pd_problem(rng, 40);
  SolverConfig cfg;
  cfg.max_sweeps = 1;
  cfg.tolerance = 1e-14;
  const QpResult r = qp_coordinate_ascent(p, cfg);
  CHECK_FALSE(r.converged);
  CHECK(r.sweeps == 1);
  CHECK(r.z.size() == 40);
}

TEST_CASE("qp validation rejects malformed problems") {
  QpProblem bad;
  bad.q = Matrix(2, 2);
  bad.q(0, 0) = 1.0;
  bad.q(1, 1) = -1.0;  // non-positive diagonal
  bad.b = {0.0, 0.0};
  CHECK_THROWS(qp_coordinate_ascent(bad));

  QpProblem asym;
  asym.q = Matrix(2, 2);
  asym.q(0, 0) = asym.q(1, 1) = 1.0;
  asym.q(0, 1) = 0.5;
  asym.q(1, 0) = 0.25;
  asym.b = {0.0, 0.0};
  CHECK_THROWS(qp_coordinate_ascent(asym));
}
