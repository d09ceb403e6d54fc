// Acceptance suite: every criterion below runs at its stated tolerance and
// prints one PASS/FAIL line. The binary exits non-zero when any criterion
// fails.

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <string>
#include <vector>

#include "gblstsvm/eval.hpp"
#include "gblstsvm/granular.hpp"
#include "gblstsvm/harness.hpp"
#include "gblstsvm/models.hpp"
#include "gblstsvm/rng.hpp"
#include "gblstsvm/simd.hpp"

using namespace gblstsvm;

namespace {

int g_failures = 0;

void report(int idx, const char* name, bool pass, const std::string& detail) {
  std::printf("%s  criterion %2d: %s%s%s\n", pass ? "PASS" : "FAIL", idx, name,
              detail.empty() ? "" : " -- ", detail.c_str());
  if (!pass) ++g_failures;
}

double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof(buf), f, args);
  va_end(args);
  return buf;
}

// ---------------------------------------------------------------- criterion 1
void criterion_friedman() {
  const Vector ranks = {3.88, 5.26, 5.15, 2.59, 1.62, 2.50};
  const double t0 = now_ms();
  const FriedmanResult r = friedman(ranks, 34, 2.2689);
  const double elapsed = now_ms() - t0;
  const bool pass = std::fabs(r.chi2 - 110.03) <= 0.01 && std::fabs(r.ff - 60.54) <= 0.05 &&
                    elapsed < 1.0;
  report(1, "Friedman reproduction", pass,
         fmt("chi2 = %.4f (want 110.03 +/- 0.01), F_F = %.4f (want 60.54 +/- 0.05), %.3f ms",
             r.chi2, r.ff, elapsed));
}

// ---------------------------------------------------------------- criterion 2
void criterion_wtl_threshold() {
  const Vector a(34, 0.5), b(34, 0.5);
  const double t0 = now_ms();
  const WinTieLoss r = win_tie_loss(a, b);
  const double elapsed = now_ms() - t0;
  const bool pass = std::fabs(r.significance_threshold - 22.71) <= 0.005 && elapsed < 1.0;
  report(2, "win-tie-loss threshold", pass,
         fmt("threshold = %.4f (want 22.71 +/- 0.005), %.3f ms", r.significance_threshold,
             elapsed));
}

// ---------------------------------------------------------------- criterion 3
void criterion_wilcoxon() {
  const AccuracyTable t =
      AccuracyTable::read_csv(std::string(GBLSTSVM_FIXTURE_DIR) + "/table_s2_linear_0noise.csv");
  std::size_t svm = 0, gb = 0;
  for (std::size_t j = 0; j < t.models.size(); ++j) {
    if (t.models[j] == "svm") svm = j;
    if (t.models[j] == "gblstsvm") gb = j;
  }
  Vector acc_svm(t.datasets.size()), acc_gb(t.datasets.size());
  for (std::size_t i = 0; i < t.datasets.size(); ++i) {
    acc_svm[i] = t.acc(i, svm);
    acc_gb[i] = t.acc(i, gb);
  }
  const WilcoxonResult r = wilcoxon_signed_rank(acc_gb, acc_svm);
  const bool pass = r.r_plus == 465.0 && r.r_minus == 0.0 && r.p_value <= 2.0 * 1.819e-6 &&
                    r.p_value >= 0.5 * 1.819e-6;
  report(3, "Wilcoxon reproduction", pass,
         fmt("R+ = %.1f (want 465), R- = %.1f (want 0), p = %.4g (want within 2x of 1.819e-6)",
             r.r_plus, r.r_minus, r.p_value));
}

// ---------------------------------------------------------------- criterion 4
void criterion_singleton_oracle() {
  const double t0 = now_ms();
  Rng rng(404);
  double worst = 0.0;
  int checked = 0;
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t m = 4 + rng.uniform_index(57);   // <= 60
    const std::size_t dim = 1 + rng.uniform_index(8);  // <= 8
    Dataset d = gen_ndc(m, dim, rng.uniform(0.5, 4.0), 7000 + rep);
    bool pos = false, neg = false;
    for (int y : d.labels) (y > 0 ? pos : neg) = true;
    if (!pos || !neg) continue;
    const BallSet bs = singleton_balls(d);
    for (const double c : {1e-3, 1.0, 1e3}) {
      const PlanePair gb = fit_gblstsvm_linear(bs, c, c);
      const PlanePair ls = fit_lstsvm(bs.C, bs.D, c, c);
      for (std::size_t j = 0; j < dim; ++j) {
        worst = std::max(worst, std::fabs(gb.w1[j] - ls.w1[j]));
        worst = std::max(worst, std::fabs(gb.w2[j] - ls.w2[j]));
      }
      worst = std::max(worst, std::fabs(gb.b1 - ls.b1));
      worst = std::max(worst, std::fabs(gb.b2 - ls.b2));
      ++checked;
    }
  }
  const double elapsed = now_ms() - t0;
  const bool pass = worst <= 1e-8 && elapsed < 10000.0 && checked >= 100;
  report(4, "singleton-ball equivalence oracle", pass,
         fmt("%d fits, max |gb - lstsvm| = %.3g (want <= 1e-8), %.0f ms (want < 10 s)", checked,
             worst, elapsed));
}

// ---------------------------------------------------------------- criterion 5
void criterion_dual_solver_oracle() {
  const double t0 = now_ms();
  Rng rng(505);
  double worst = 0.0;
  bool monotone = true;
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 2 + rng.uniform_index(199);  // <= 200
    Matrix a(n + 2, n);
    for (double& v : a.data()) v = rng.normal();
    QpProblem p;
    p.q = Matrix(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j <= i; ++j) {
        double acc = 0.0;
        for (std::size_t r = 0; r < a.rows(); ++r) acc += a(r, i) * a(r, j);
        p.q(i, j) = p.q(j, i) = acc / double(n);
      }
    for (std::size_t i = 0; i < n; ++i) p.q(i, i) += 0.5;
    p.b.resize(n);
    for (double& v : p.b) v = rng.normal();

    const QpResult r = qp_coordinate_ascent(p);
    for (std::size_t s = 1; s < r.objective_trace.size(); ++s)
      monotone &= r.objective_trace[s] <= r.objective_trace[s - 1] + 1e-12;

    Eigen::MatrixXd qe(n, n);
    Eigen::VectorXd be(n);
    for (std::size_t i = 0; i < n; ++i) {
      be(i) = p.b[i];
      for (std::size_t j = 0; j < n; ++j) qe(i, j) = p.q(i, j);
    }
    const Eigen::VectorXd ref = qe.ldlt().solve(-be);
    for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::fabs(r.z[i] - ref(i)));
  }
  const double elapsed = now_ms() - t0;
  const bool pass = worst <= 1e-6 && monotone && elapsed < 30000.0;
  report(5, "dual-solver agreement oracle", pass,
         fmt("100 problems, max |z_cd - z_direct| = %.3g (want <= 1e-6), monotone %s, %.0f ms",
             worst, monotone ? "yes" : "NO", elapsed));
}

// ---------------------------------------------------------------- criterion 6
void criterion_hand_fixtures() {
  BallSet bs;
  bs.C = Matrix(1, 1);
  bs.C(0, 0) = 1.0;
  bs.D = Matrix(1, 1);
  bs.D(0, 0) = -1.0;
  bs.r_plus = {0.0};
  bs.r_minus = {0.0};
  GranularBall gp, gn;
  gp.center = {1.0};
  gp.label = 1;
  gp.size = 1;
  gn.center = {-1.0};
  gn.label = -1;
  gn.size = 1;
  bs.balls = {gp, gn};

  double worst = 0.0;
  const PlanePair ls = fit_lstsvm(bs.C, bs.D, 1.0, 1.0);
  const PlanePair gb = fit_gblstsvm_linear(bs, 1.0, 1.0);
  for (const PlanePair* p : {&ls, &gb}) {
    worst = std::max(worst, std::fabs(p->w1[0] - 0.5));
    worst = std::max(worst, std::fabs(p->b1 + 0.5));
    worst = std::max(worst, std::fabs(p->w2[0] - 0.5));
    worst = std::max(worst, std::fabs(p->b2 - 0.5));
  }
  const PlanePair lsg = fit_lsgblstsvm_linear(bs, 1.0, 1.0, 1.0, 1.0);
  worst = std::max(worst, std::fabs(lsg.w1[0] - 1.0 / 3.0));
  worst = std::max(worst, std::fabs(lsg.b1 + 1.0 / 3.0));
  worst = std::max(worst, std::fabs(lsg.w2[0] - 1.0 / 3.0));
  worst = std::max(worst, std::fabs(lsg.b2 - 1.0 / 3.0));

  // independent dense oracle for both systems
  Eigen::Matrix2d m1;
  m1 << 2.0, 0.0, 0.0, 2.0;
  const Eigen::Vector2d closed = -m1.ldlt().solve(Eigen::Vector2d(-1.0, 1.0));
  worst = std::max(worst, std::fabs(closed(0) - 0.5));
  Eigen::Matrix2d q1;
  q1 << 3.0, 0.0, 0.0, 3.0;
  const Eigen::Vector2d dual = q1.ldlt().solve(-Eigen::Vector2d(0.0, 1.0));
  const double w1_oracle = 1.0 * dual(0) + -1.0 * dual(1);  // (C'a + D'b)/c3
  worst = std::max(worst, std::fabs(lsg.w1[0] - w1_oracle));

  const bool pass = worst <= 1e-6;
  report(6, "hand-derived one-dimensional fixtures", pass,
         fmt("max deviation = %.3g (want <= 1e-6)", worst));
}

// ---------------------------------------------------------------- criterion 7
void criterion_crossplane() {
  const double t0 = now_ms();
  // grid-order tie-break: prefer stronger regularization and finer
  // granulation among CV-tied points
  HyperGrid grid;
  grid.c1 = {1e-5, 1e-3, 0.1, 1.0, 10.0};
  grid.c3 = {10.0, 1.0, 0.1, 1e-3, 1e-5};
  grid.sigma = {1.0};
  grid.pur = {0.99, 0.95};
  grid.num = {4, 2};

  double acc_gb = 0.0, acc_ls = 0.0;
  for (int seed = 0; seed < 10; ++seed) {
    const Dataset d = gen_crossplane(130, 0.01, 100 + seed);
    auto [train, test] = train_test_split(d, 0.7, seed);
    for (const Variant v : {Variant::gblstsvm, Variant::lsgblstsvm}) {
      const GridSearchResult gs =
          kfold_grid_search(train, grid, 5, v, KernelKind::linear, seed);
      const Model m = train_pipeline(train, gs.best, v, KernelSpec::linear(), seed);
      const double acc = accuracy(m.predict(test.features), test.labels);
      (v == Variant::gblstsvm ? acc_gb : acc_ls) += acc / 10.0;
    }
  }
  const double elapsed = now_ms() - t0;
  const bool pass = acc_gb >= 0.98 && acc_ls >= 0.98 && elapsed < 5000.0;
  report(7, "crossplane behavior", pass,
         fmt("mean test acc: gblstsvm %.4f, ls-gblstsvm %.4f (want >= 0.98), %.0f ms (< 5 s)",
             acc_gb, acc_ls, elapsed));
}

// ---------------------------------------------------------------- criterion 8
void criterion_noise_robustness() {
  const double t0 = now_ms();
  HyperGrid grid;
  grid.c1 = {1e-5, 1e-3, 1.0, 100.0};
  grid.c3 = {1.0};
  grid.sigma = {1.0};
  grid.pur = {0.95};
  grid.num = {2};

  double mean_acc = 0.0;
  for (int seed = 0; seed < 10; ++seed) {
    const Dataset d = gen_ndc(2000, 8, 6.0, 800 + seed);
    auto [train, test] = train_test_split(d, 0.7, seed);
    const Dataset noisy = inject_label_noise(train, 0.2, seed);
    const GridSearchResult gs =
        kfold_grid_search(noisy, grid, 5, Variant::gblstsvm, KernelKind::linear, seed);
    const Model m = train_pipeline(noisy, gs.best, Variant::gblstsvm, KernelSpec::linear(), seed);
    mean_acc += accuracy(m.predict(test.features), test.labels) / 10.0;
  }
  const double elapsed = now_ms() - t0;
  const bool pass = mean_acc >= 0.90;
  report(8, "noise robustness at 20% training-label noise", pass,
         fmt("mean clean-test accuracy %.4f (want >= 0.90), %.0f ms", mean_acc, elapsed));
}

// ---------------------------------------------------------------- criterion 9
void criterion_scalability() {
  const double t0 = now_ms();
  std::string detail;
  bool pass = true;
  for (const std::size_t m : {std::size_t{10000}, std::size_t{50000}, std::size_t{100000}}) {
    const Dataset d = gen_ndc(m, 32, 6.0, 42);
    const HyperParams hp = [] {
      HyperParams h;
      h.c1 = h.c2 = h.c3 = h.c4 = 1e-5;
      h.pur = 0.95;
      h.num = 2;
      return h;
    }();

    double t_ls = 1e300, t_gb = 1e300, t_lsgb = 1e300;
    std::size_t k = 0;
    for (int rep = 0; rep < 5; ++rep) {
      {
        const double s = now_ms();
        // class partition is part of the LSTSVM fit path
        std::size_t m1 = 0;
        for (int y : d.labels) m1 += y > 0;
        Matrix a(m1, d.dim()), b(m - m1, d.dim());
        std::size_t ia = 0, ib = 0;
        for (std::size_t i = 0; i < m; ++i) {
          double* dst = d.labels[i] > 0 ? a.row(ia++) : b.row(ib++);
          std::copy_n(d.features.row(i), d.dim(), dst);
        }
        const PlanePair p = fit_lstsvm(a, b, hp.c1, hp.c2);
        t_ls = std::min(t_ls, now_ms() - s);
        (void)p;
      }
      {
        const double s = now_ms();
        const BallSet bs = generate_balls(d, hp.pur, hp.num, 1);
        const PlanePair p = fit_gblstsvm_linear(bs, hp.c1, hp.c2);
        t_gb = std::min(t_gb, now_ms() - s);
        k = bs.count();
        (void)p;
      }
      {
        const double s = now_ms();
        const BallSet bs = generate_balls(d, hp.pur, hp.num, 1);
        const PlanePair p = fit_lsgblstsvm_linear(bs, hp.c1, hp.c2, hp.c3, hp.c4);
        t_lsgb = std::min(t_lsgb, now_ms() - s);
        (void)p;
      }
    }
    const bool k_ok = k < m / 10;
    const bool time_ok = m < 50000 || (t_gb < t_ls && t_lsgb < t_ls);
    pass = pass && k_ok && time_ok;
    detail += fmt("[m=%zu: lstsvm %.0f ms, gb %.0f ms, ls-gb %.0f ms, k=%zu] ", m, t_ls, t_gb,
                  t_lsgb, k);
  }
  const double elapsed = now_ms() - t0;
  pass = pass && elapsed < 15.0 * 60.0 * 1000.0;
  report(9, "scalability direction", pass, detail + fmt("total %.0f ms (< 15 min)", elapsed));
}

// --------------------------------------------------------------- criterion 10
void criterion_invariants() {
  Rng rng(1010);
  std::size_t cases = 0;
  bool pass = true;
  std::string fail_reason;

  // ball partition and purity invariants
  for (int rep = 0; rep < 300 && pass; ++rep) {
    const std::size_t m = 4 + rng.uniform_index(60);
    Dataset d = gen_ndc(m, 1 + rng.uniform_index(5), rng.uniform(0.0, 4.0), 20000 + rep);
    d = inject_label_noise(d, rng.uniform(0.0, 0.3), rep);
    const double pur = rng.uniform(0.55, 1.0);
    const BallSet bs = generate_balls(d, pur, 2, rep);
    std::vector<char> seen(m, 0);
    std::size_t total = 0;
    for (const auto& b : bs.balls) {
      if (!(b.purity >= pur || b.size == 1) || b.purity < 0.5 || b.radius < 0.0) {
        pass = false;
        fail_reason = "ball purity/radius invariant";
      }
      for (std::size_t idx : b.member_indices) {
        if (idx >= m || seen[idx]) {
          pass = false;
          fail_reason = "ball partition invariant";
        } else {
          seen[idx] = 1;
        }
        ++total;
      }
    }
    if (total != m) {
      pass = false;
      fail_reason = "ball partition cover";
    }
    ++cases;
  }

  // gram symmetry (and PSD spot checks through Eigen)
  for (int rep = 0; rep < 300 && pass; ++rep) {
    const std::size_t n = 2 + rng.uniform_index(24);
    const std::size_t dim = 1 + rng.uniform_index(6);
    Matrix x(n, dim);
    for (double& v : x.data()) v = 2.0 * rng.normal();
    const KernelSpec spec =
        rep % 2 ? KernelSpec::gaussian(rng.uniform(0.2, 4.0)) : KernelSpec::linear();
    const Matrix k = gram(x, x, spec);
    for (std::size_t i = 0; i < n && pass; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (std::fabs(k(i, j) - k(j, i)) > 1e-12) {
          pass = false;
          fail_reason = "gram symmetry";
          break;
        }
    if (rep % 50 == 0 && spec.kind == KernelKind::gaussian) {
      Eigen::MatrixXd ke(n, n);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) ke(i, j) = k(i, j);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ke, Eigen::EigenvaluesOnly);
      if (es.eigenvalues().minCoeff() < -1e-8) {
        pass = false;
        fail_reason = "gaussian gram PSD";
      }
    }
    ++cases;
  }

  // prediction invariance under joint positive plane scaling
  for (int rep = 0; rep < 200 && pass; ++rep) {
    PlanePair p;
    p.w1 = {rng.normal(), rng.normal(), rng.normal()};
    p.b1 = rng.normal();
    p.w2 = {rng.normal(), rng.normal(), rng.normal()};
    p.b2 = rng.normal();
    PlanePair scaled = p;
    const double g1 = std::exp(rng.uniform(-4.0, 4.0));
    const double g2 = std::exp(rng.uniform(-4.0, 4.0));
    for (double& v : scaled.w1) v *= g1;
    scaled.b1 *= g1;
    for (double& v : scaled.w2) v *= g2;
    scaled.b2 *= g2;
    for (int t = 0; t < 5; ++t) {
      const Vector x = {3.0 * rng.normal(), 3.0 * rng.normal(), 3.0 * rng.normal()};
      if (classify(p, x) != classify(scaled, x)) {
        pass = false;
        fail_reason = "scale invariance";
        break;
      }
    }
    ++cases;
  }

  // label-flip symmetry with swapped cost pairs
  for (int rep = 0; rep < 200 && pass; ++rep) {
    Dataset d;
    const std::size_t m = 10 + rng.uniform_index(20);
    d.features = Matrix(m, 2);
    d.labels.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
      const int label = i % 2 == 0 ? 1 : -1;
      d.features(i, 0) = rng.normal() + label * 1.5;
      d.features(i, 1) = rng.normal();
      d.labels[i] = label;
    }
    const BallSet bs = generate_balls(d, 0.9, 2, rep);
    BallSet flipped;
    flipped.C = bs.D;
    flipped.D = bs.C;
    flipped.r_plus = bs.r_minus;
    flipped.r_minus = bs.r_plus;
    flipped.balls = bs.balls;
    const double c1 = std::pow(10.0, rng.uniform(-1, 1));
    const double c2 = std::pow(10.0, rng.uniform(-1, 1));
    const double c3 = std::pow(10.0, rng.uniform(-1, 1));
    const double c4 = std::pow(10.0, rng.uniform(-1, 1));
    const PlanePair a = fit_gblstsvm_linear(bs, c1, c2);
    const PlanePair b = fit_gblstsvm_linear(flipped, c2, c1);
    const PlanePair la = fit_lsgblstsvm_linear(bs, c1, c2, c3, c4);
    const PlanePair lb = fit_lsgblstsvm_linear(flipped, c2, c1, c4, c3);
    for (int t = 0; t < 5; ++t) {
      const Vector x = {2.0 * rng.normal(), 2.0 * rng.normal()};
      if (classify(b, x) != -classify(a, x) || classify(lb, x) != -classify(la, x)) {
        pass = false;
        fail_reason = "label-flip symmetry";
        break;
      }
    }
    ++cases;
  }

  pass = pass && cases >= 1000;
  report(10, "property-based invariant suite", pass,
         fmt("%zu generated cases%s%s", cases, pass ? "" : ", first failure: ",
             pass ? "" : fail_reason.c_str()));
}

}  // namespace

int main() {
  std::printf("acceptance suite (backend: %s)\n", std::string(simd::backend_name()).c_str());
  criterion_friedman();
  criterion_wtl_threshold();
  criterion_wilcoxon();
  criterion_singleton_oracle();
  criterion_dual_solver_oracle();
  criterion_hand_fixtures();
  criterion_crossplane();
  criterion_noise_robustness();
  criterion_scalability();
  criterion_invariants();
  if (g_failures == 0) {
    std::printf("all criteria passed\n");
    return 0;
  }
  std::printf("%d criteria FAILED\n", g_failures);
  return 1;
}
