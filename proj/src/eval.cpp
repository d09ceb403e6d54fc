#include "gblstsvm/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "gblstsvm/rng.hpp"

namespace gblstsvm {

void AccuracyTable::validate() const {
  if (models.empty() || datasets.empty())
    throw std::invalid_argument("accuracy table: need at least one model and one dataset");
  if (acc.rows() != datasets.size() || acc.cols() != models.size())
    throw std::invalid_argument("accuracy table: shape mismatch");
  for (double v : acc.data())
    if (!(v >= 0.0 && v <= 1.0))
      throw std::invalid_argument("accuracy table: entries must lie in [0, 1]");
}

AccuracyTable AccuracyTable::read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("accuracy table: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("accuracy table: empty file " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();

  AccuracyTable t;
  {
    std::stringstream ss(line);
    std::string cell;
    bool first = true;
    while (std::getline(ss, cell, ',')) {
      if (first) {
        first = false;  // corner cell ("dataset")
        continue;
      }
      t.models.push_back(cell);
    }
  }
  std::vector<double> values;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    bool first = true;
    std::size_t got = 0;
    while (std::getline(ss, cell, ',')) {
      if (first) {
        t.datasets.push_back(cell);
        first = false;
        continue;
      }
      values.push_back(std::stod(cell));
      ++got;
    }
    if (got != t.models.size())
      throw std::runtime_error("accuracy table: ragged row in " + path);
  }
  t.acc = Matrix(t.datasets.size(), t.models.size());
  t.acc.data() = values;
  t.validate();
  return t;
}

void AccuracyTable::write_csv(const std::string& path) const {
  validate();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("accuracy table: cannot open " + path);
  out << "dataset";
  for (const auto& m : models) out << "," << m;
  out << "\n";
  char tmp[32];
  for (std::size_t i = 0; i < datasets.size(); ++i) {
    out << datasets[i];
    for (std::size_t j = 0; j < models.size(); ++j) {
      std::snprintf(tmp, sizeof(tmp), "%.6f", acc(i, j));
      out << "," << tmp;
    }
    out << "\n";
  }
  if (!out) throw std::runtime_error("accuracy table: write failure on " + path);
}

double accuracy(const std::vector<int>& predicted, const std::vector<int>& actual) {
  if (predicted.size() != actual.size() || predicted.empty())
    throw std::invalid_argument("accuracy: label vectors must match and be non-empty");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) hits += predicted[i] == actual[i];
  return static_cast<double>(hits) / static_cast<double>(predicted.size());
}

HyperGrid HyperGrid::paper_defaults() {
  HyperGrid g;
  for (int e = -5; e <= 5; ++e) g.c1.push_back(std::pow(10.0, e));
  g.c3 = g.c1;
  for (int e = -5; e <= 5; ++e) g.sigma.push_back(std::pow(2.0, e));
  g.pur = {0.925, 0.94, 0.955, 0.97, 0.985};
  g.num = {2, 3, 4};
  return g;
}

HyperGrid HyperGrid::coarse() {
  HyperGrid g;
  g.c1 = {1e-5, 1e-3, 1.0, 1e2};
  g.c3 = g.c1;
  g.sigma = {0.25, 1.0, 4.0};
  g.pur = {0.95};
  g.num = {2};
  return g;
}

std::vector<HyperParams> HyperGrid::enumerate(Variant variant, KernelKind kind) const {
  if (c1.empty() || c3.empty()) throw std::invalid_argument("grid: c1 and c3 lists required");
  const bool uses_balls = variant != Variant::lstsvm;
  const bool uses_reg = variant == Variant::lsgblstsvm;
  const bool uses_sigma = kind == KernelKind::gaussian;

  const std::vector<double> c2s = c2.empty() ? std::vector<double>{-1.0} : c2;
  const std::vector<double> c3s = uses_reg ? c3 : std::vector<double>{1.0};
  const std::vector<double> c4s = !uses_reg || c4.empty() ? std::vector<double>{-1.0} : c4;
  const std::vector<double> sigmas = uses_sigma ? sigma : std::vector<double>{1.0};
  const std::vector<double> purs = uses_balls ? pur : std::vector<double>{0.95};
  const std::vector<std::size_t> nums = uses_balls ? num : std::vector<std::size_t>{2};
  if (uses_sigma && sigma.empty()) throw std::invalid_argument("grid: sigma list required");
  if (uses_balls && (pur.empty() || num.empty()))
    throw std::invalid_argument("grid: pur and num lists required");

  std::vector<HyperParams> out;
  for (double v1 : c1)
    for (double v2 : c2s)
      for (double v3 : c3s)
        for (double v4 : c4s)
          for (double s : sigmas)
            for (double p : purs)
              for (std::size_t n : nums) {
                HyperParams hp;
                hp.c1 = v1;
                hp.c2 = v2 < 0 ? v1 : v2;
                hp.c3 = v3;
                hp.c4 = v4 < 0 ? v3 : v4;
                hp.sigma = s;
                hp.pur = p;
                hp.num = n;
                out.push_back(hp);
              }
  return out;
}

namespace {

struct Fold {
  Dataset train;
  Dataset test;
  bool usable = false;  // training side has both classes
};

std::vector<Fold> make_folds(const Dataset& d, std::size_t k, std::uint64_t seed) {
  const std::size_t m = d.size();
  std::vector<std::size_t> idx(m);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(seed);
  shuffle(idx.begin(), idx.end(), rng);

  std::vector<Fold> folds(k);
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t lo = f * m / k, hi = (f + 1) * m / k;
    std::vector<std::size_t> test_idx(idx.begin() + lo, idx.begin() + hi);
    std::vector<std::size_t> train_idx;
    train_idx.reserve(m - test_idx.size());
    train_idx.insert(train_idx.end(), idx.begin(), idx.begin() + lo);
    train_idx.insert(train_idx.end(), idx.begin() + hi, idx.end());
    if (test_idx.empty() || train_idx.empty()) continue;
    std::sort(test_idx.begin(), test_idx.end());
    std::sort(train_idx.begin(), train_idx.end());

    Fold& fold = folds[f];
    fold.train.features = Matrix(train_idx.size(), d.dim());
    fold.train.labels.resize(train_idx.size());
    for (std::size_t i = 0; i < train_idx.size(); ++i) {
      std::copy_n(d.features.row(train_idx[i]), d.dim(), fold.train.features.row(i));
      fold.train.labels[i] = d.labels[train_idx[i]];
    }
    fold.test.features = Matrix(test_idx.size(), d.dim());
    fold.test.labels.resize(test_idx.size());
    for (std::size_t i = 0; i < test_idx.size(); ++i) {
      std::copy_n(d.features.row(test_idx[i]), d.dim(), fold.test.features.row(i));
      fold.test.labels[i] = d.labels[test_idx[i]];
    }
    const bool pos = std::any_of(fold.train.labels.begin(), fold.train.labels.end(),
                                 [](int y) { return y > 0; });
    const bool neg = std::any_of(fold.train.labels.begin(), fold.train.labels.end(),
                                 [](int y) { return y < 0; });
    fold.usable = pos && neg;
  }
  return folds;
}

}  // namespace

GridSearchResult kfold_grid_search(const Dataset& d, const HyperGrid& grid, std::size_t folds,
                                   Variant variant, KernelKind kind, std::uint64_t seed,
                                   const SolverConfig& cfg, std::size_t workers) {
  d.validate();
  if (folds < 2) throw std::invalid_argument("grid search: need at least 2 folds");
  if (d.size() < folds) throw std::invalid_argument("grid search: need at least one sample per fold");

  const std::vector<HyperParams> points = grid.enumerate(variant, kind);
  const std::vector<Fold> fold_data = make_folds(d, folds, Rng::mix(seed, 0));
  const KernelSpec base_spec =
      kind == KernelKind::gaussian ? KernelSpec::gaussian(1.0) : KernelSpec::linear();

  // each point owns a derived seed, so evaluation order cannot matter
  std::vector<double> cv(points.size(), -1.0);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  auto eval_point = [&](std::size_t pi) {
    const HyperParams& hp = points[pi];
    KernelSpec spec = base_spec;
    spec.sigma = hp.sigma;
    double acc_sum = 0.0;
    std::size_t used = 0;
    for (std::size_t f = 0; f < fold_data.size(); ++f) {
      const Fold& fold = fold_data[f];
      if (!fold.usable) continue;
      const std::uint64_t fit_seed = Rng::mix(seed, 1 + pi * fold_data.size() + f);
      Model m = train_pipeline(fold.train, hp, variant, spec, fit_seed, cfg);
      acc_sum += accuracy(m.predict(fold.test.features), fold.test.labels);
      ++used;
    }
    if (used == 0) {
      failed = true;
      return;
    }
    cv[pi] = acc_sum / static_cast<double>(used);
  };

  if (workers > 1 && points.size() > 1) {
    std::vector<std::thread> pool;
    const std::size_t nthreads = std::min(workers, points.size());
    pool.reserve(nthreads);
    for (std::size_t w = 0; w < nthreads; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < points.size(); i = next.fetch_add(1))
          eval_point(i);
      });
    }
    for (auto& t : pool) t.join();
  } else {
    for (std::size_t pi = 0; pi < points.size(); ++pi) eval_point(pi);
  }
  if (failed)
    throw std::runtime_error("grid search: every fold had a single-class training side");

  GridSearchResult best;
  best.best = points.front();
  best.cv_accuracy = cv.front();
  for (std::size_t pi = 1; pi < points.size(); ++pi) {
    if (cv[pi] > best.cv_accuracy) {
      best.best = points[pi];
      best.cv_accuracy = cv[pi];
    }
  }
  best.evaluated = points.size();
  return best;
}

namespace {

/// Midranks with rank 1 for the largest value.
Vector midranks_desc(const Vector& vals) {
  const std::size_t n = vals.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return vals[a] > vals[b]; });
  Vector ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && vals[order[j + 1]] == vals[order[i]]) ++j;
    const double shared = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = shared;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

Vector average_ranks(const AccuracyTable& t) {
  t.validate();
  const std::size_t l = t.models.size();
  Vector avg(l, 0.0);
  for (std::size_t ds = 0; ds < t.datasets.size(); ++ds) {
    Vector row(l);
    for (std::size_t j = 0; j < l; ++j) row[j] = t.acc(ds, j);
    const Vector ranks = midranks_desc(row);
    for (std::size_t j = 0; j < l; ++j) avg[j] += ranks[j];
  }
  for (double& v : avg) v /= static_cast<double>(t.datasets.size());
  return avg;
}

FriedmanResult friedman(const Vector& avg_ranks, std::size_t n_datasets, double critical_value) {
  const std::size_t l = avg_ranks.size();
  const double m = static_cast<double>(n_datasets);
  if (l < 2 || n_datasets < 2)
    throw std::invalid_argument("friedman: need at least 2 models and 2 datasets");
  double sumsq = 0.0;
  for (double r : avg_ranks) sumsq += r * r;
  const double ld = static_cast<double>(l);
  FriedmanResult res;
  res.chi2 = 12.0 * m / (ld * (ld + 1.0)) * (sumsq - ld * (ld + 1.0) * (ld + 1.0) / 4.0);
  const double denom = m * (ld - 1.0) - res.chi2;
  if (std::fabs(denom) <= 1e-12 * m * (ld - 1.0)) {
    res.ff_defined = false;
    return res;
  }
  res.ff = (m - 1.0) * res.chi2 / denom;
  res.reject = res.ff > critical_value;
  return res;
}

WilcoxonResult wilcoxon_signed_rank(const Vector& acc_a, const Vector& acc_b) {
  if (acc_a.size() != acc_b.size())
    throw std::invalid_argument("wilcoxon: vectors must have equal length");
  Vector diffs;
  for (std::size_t i = 0; i < acc_a.size(); ++i) {
    const double d = acc_a[i] - acc_b[i];
    if (d != 0.0) diffs.push_back(d);
  }
  WilcoxonResult res;
  res.n_nonzero = diffs.size();
  if (diffs.empty()) {
    res.p_value = 1.0;
    return res;
  }
  const std::size_t n = diffs.size();
  Vector abs_d(n);
  for (std::size_t i = 0; i < n; ++i) abs_d[i] = std::fabs(diffs[i]);
  // ascending midranks on |diff|
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return abs_d[a] < abs_d[b]; });
  Vector ranks(n);
  double tie_sum = 0.0;  // sum of t^3 - t over tie groups
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && abs_d[order[j + 1]] == abs_d[order[i]]) ++j;
    const double shared = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    const double t = static_cast<double>(j - i + 1);
    tie_sum += t * t * t - t;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
    i = j + 1;
  }
  for (std::size_t k = 0; k < n; ++k) (diffs[k] > 0 ? res.r_plus : res.r_minus) += ranks[k];

  const double nd = static_cast<double>(n);
  const double mean = nd * (nd + 1.0) / 4.0;
  const double var = nd * (nd + 1.0) * (2.0 * nd + 1.0) / 24.0 - tie_sum / 48.0;
  if (var <= 0.0) {
    res.p_value = 1.0;  // all |diffs| tied at one value and n tiny
    return res;
  }
  // continuity-corrected two-sided normal approximation
  const double num = std::fabs(res.r_plus - mean) - 0.5;
  const double z = std::max(0.0, num) / std::sqrt(var);
  res.p_value = std::erfc(z / std::sqrt(2.0));
  return res;
}

WinTieLoss win_tie_loss(const Vector& acc_a, const Vector& acc_b) {
  if (acc_a.size() != acc_b.size())
    throw std::invalid_argument("win_tie_loss: vectors must have equal length");
  WinTieLoss res;
  for (std::size_t i = 0; i < acc_a.size(); ++i) {
    if (acc_a[i] > acc_b[i])
      ++res.raw_wins;
    else if (acc_a[i] < acc_b[i])
      ++res.raw_losses;
    else
      ++res.raw_ties;
  }
  // even tie counts split evenly; an odd count drops one tie first
  const std::size_t shared = res.raw_ties / 2;
  res.wins = static_cast<double>(res.raw_wins + shared);
  res.losses = static_cast<double>(res.raw_losses + shared);
  const double m = static_cast<double>(acc_a.size());
  res.significance_threshold = m / 2.0 + 1.96 * std::sqrt(m) / 2.0;
  return res;
}

}  // namespace gblstsvm
