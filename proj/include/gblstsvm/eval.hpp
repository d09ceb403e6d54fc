#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gblstsvm/dataset.hpp"
#include "gblstsvm/hyperparams.hpp"
#include "gblstsvm/models.hpp"

namespace gblstsvm {

/// Accuracies of l models over M datasets; no missing entries.
struct AccuracyTable {
  std::vector<std::string> models;    // l names
  std::vector<std::string> datasets;  // M names
  Matrix acc;                         // M x l, values in [0, 1]

  void validate() const;
  static AccuracyTable read_csv(const std::string& path);
  void write_csv(const std::string& path) const;
};

double accuracy(const std::vector<int>& predicted, const std::vector<int>& actual);

/// Cartesian hyperparameter grid. Empty c2/c4 lists tie them to c1/c3
/// (the paper's pairing rule). Lists irrelevant to a variant/kernel are
/// collapsed to a single placeholder during enumeration.
struct HyperGrid {
  std::vector<double> c1;
  std::vector<double> c2;  // empty: tied to c1
  std::vector<double> c3;
  std::vector<double> c4;  // empty: tied to c3
  std::vector<double> sigma;
  std::vector<double> pur;
  std::vector<std::size_t> num;

  /// c in {1e-5..1e5}, sigma in {2^-5..2^5}, pur {0.925..0.985},
  /// num {2,3,4}, with c2/c4 tied.
  static HyperGrid paper_defaults();
  /// A coarse sub-grid for quick runs: c in {1e-5,1e-3,1,1e2}, sigma in
  /// {0.25,1,4}, pur {0.95}, num {2}.
  static HyperGrid coarse();

  std::vector<HyperParams> enumerate(Variant variant, KernelKind kind) const;
};

struct GridSearchResult {
  HyperParams best;
  double cv_accuracy = 0.0;
  std::size_t evaluated = 0;
};

/// Exhaustive search maximizing mean k-fold CV accuracy; ties break on grid
/// order; deterministic per seed regardless of worker count (each point gets
/// a derived seed and results reduce in grid order). Folds whose training
/// side is single-class are skipped; a grid point with no usable fold
/// raises. workers = 0 keeps the search single-threaded.
GridSearchResult kfold_grid_search(const Dataset& d, const HyperGrid& grid, std::size_t folds,
                                   Variant variant, KernelKind kind, std::uint64_t seed,
                                   const SolverConfig& cfg = {}, std::size_t workers = 0);

/// Per dataset the best accuracy gets rank 1; ties share midranks. Returns
/// the per-model average over datasets.
Vector average_ranks(const AccuracyTable& t);

struct FriedmanResult {
  double chi2 = 0.0;
  double ff = 0.0;
  bool ff_defined = true;  // false when chi2 = M(l-1) makes F_F undefined
  bool reject = false;     // ff > caller-supplied critical value
};

/// chi2 = 12M/(l(l+1)) [sum R_s^2 - l(l+1)^2/4], F_F = (M-1)chi2/(M(l-1)-chi2).
/// The degenerate chi2 = M(l-1) case is reported through ff_defined.
FriedmanResult friedman(const Vector& avg_ranks, std::size_t n_datasets, double critical_value);

struct WilcoxonResult {
  double r_plus = 0.0;
  double r_minus = 0.0;
  double p_value = 1.0;
  std::size_t n_nonzero = 0;
};

/// Signed-rank test on acc_a - acc_b: zero differences dropped, midranks on
/// |diff| ties, two-sided p from the normal approximation with tie and
/// continuity correction.
WilcoxonResult wilcoxon_signed_rank(const Vector& acc_a, const Vector& acc_b);

struct WinTieLoss {
  std::size_t raw_wins = 0;
  std::size_t raw_ties = 0;
  std::size_t raw_losses = 0;
  double wins = 0.0;    // after tie redistribution
  double losses = 0.0;  // after tie redistribution
  double significance_threshold = 0.0;  // M/2 + 1.96 sqrt(M)/2
};

WinTieLoss win_tie_loss(const Vector& acc_a, const Vector& acc_b);

}  // namespace gblstsvm
