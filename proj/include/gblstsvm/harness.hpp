#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gblstsvm/eval.hpp"

namespace gblstsvm {

enum class NoiseTarget { train_only, train_and_test };

/// Configuration shared by the benchmark and stats entry points; the CLI
/// fills it from flags and an optional key-value config file.
struct RunConfig {
  std::vector<std::string> dataset_paths;
  std::optional<std::size_t> label_column;  // default: the last CSV column
  std::vector<Variant> variants = {Variant::lstsvm, Variant::gblstsvm, Variant::lsgblstsvm};
  KernelKind kernel = KernelKind::linear;
  std::vector<double> noise_levels = {0.0};
  NoiseTarget noise_target = NoiseTarget::train_only;
  double train_fraction = 0.7;
  std::size_t folds = 5;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  HyperGrid grid = HyperGrid::coarse();
  bool normalize = true;
  std::size_t workers = 0;  // 0: hardware concurrency
  SolverConfig solver;
  std::string stats_table;                 // input table for `stats`
  std::optional<double> friedman_critical; // reject flag only when supplied
};

struct BenchmarkRow {
  std::string dataset;
  double noise = 0.0;
  Variant variant = Variant::lstsvm;
  KernelKind kernel = KernelKind::linear;
  double test_accuracy = 0.0;
  std::size_t ball_count = 0;
  double fit_ms = 0.0;
  HyperParams selected;
  double cv_accuracy = 0.0;
  bool failed = false;
  std::string error;
};

struct BenchmarkReport {
  std::vector<BenchmarkRow> rows;
  AccuracyTable table;
  std::size_t failed_cells = 0;
};

/// Runs every (dataset, noise, variant) cell: split, normalize on train
/// parameters, inject noise, grid-search with k-fold CV, refit on the full
/// training side, evaluate on the test side. Writes results.csv and
/// accuracy_table.csv into cfg.out_dir. Throws when every dataset fails.
BenchmarkReport run_benchmark(const RunConfig& cfg);

struct PairwiseStats {
  std::string model_a;
  std::string model_b;
  WilcoxonResult wilcoxon;
  WinTieLoss wtl;
};

struct StatsReport {
  std::vector<std::string> models;
  Vector ranks;            // full precision
  Vector ranks_2dp;        // ranks rounded as they are reported
  FriedmanResult fr;       // from full-precision ranks
  FriedmanResult fr_2dp;   // from the rounded ranks
  std::vector<PairwiseStats> pairwise;
};

/// Reads cfg.stats_table, computes ranks / Friedman / pairwise Wilcoxon and
/// win-tie-loss, writes stats.txt and stats.kv into cfg.out_dir.
StatsReport run_stats(const RunConfig& cfg);

}  // namespace gblstsvm
