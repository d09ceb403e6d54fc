#include "gblstsvm/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "gblstsvm/rng.hpp"

namespace gblstsvm {

namespace {

std::string kernel_name(KernelKind k) { return k == KernelKind::gaussian ? "gaussian" : "linear"; }

std::string dataset_tag(const std::string& path, double noise) {
  std::string stem = std::filesystem::path(path).stem().string();
  char buf[32];
  std::snprintf(buf, sizeof(buf), "@%.2f", noise);
  return stem + buf;
}

std::string format_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

struct PreparedCell {
  Dataset train;  // normalized, noise injected
  Dataset test;   // normalized (noise only when target = train_and_test)
};

}  // namespace

BenchmarkReport run_benchmark(const RunConfig& cfg) {
  if (cfg.dataset_paths.empty()) throw std::invalid_argument("benchmark: need at least one dataset");
  if (cfg.variants.empty()) throw std::invalid_argument("benchmark: need at least one variant");
  for (double nl : cfg.noise_levels)
    if (!(nl >= 0.0 && nl <= 0.5))
      throw std::invalid_argument("benchmark: noise levels must lie in [0, 0.5]");
  std::filesystem::create_directories(cfg.out_dir);

  const std::size_t n_ds = cfg.dataset_paths.size();
  const std::size_t n_noise = cfg.noise_levels.size();
  const std::size_t n_var = cfg.variants.size();

  // per (dataset, noise): split/normalize/corrupt once, shared by variants
  std::vector<std::optional<PreparedCell>> prepared(n_ds * n_noise);
  std::vector<std::string> prepare_errors(n_ds * n_noise);
  CsvOptions csv_opts;
  csv_opts.label_column = cfg.label_column;
  for (std::size_t di = 0; di < n_ds; ++di) {
    Dataset full;
    std::string load_error;
    bool loaded = false;
    try {
      full = load_csv(cfg.dataset_paths[di], csv_opts);
      loaded = true;
    } catch (const std::exception& e) {
      load_error = e.what();
    }
    for (std::size_t ni = 0; ni < n_noise; ++ni) {
      const std::size_t slot = di * n_noise + ni;
      if (!loaded) {
        prepare_errors[slot] = load_error;
        continue;
      }
      try {
        const std::uint64_t split_seed = Rng::mix(cfg.seed, di);
        auto [train, test] = train_test_split(full, cfg.train_fraction, split_seed);
        if (cfg.normalize) {
          auto [norm_train, params] = minmax_normalize(train);
          train = std::move(norm_train);
          test = apply_normalization(test, params);
        }
        const std::uint64_t noise_seed = Rng::mix(cfg.seed, 1000 + di * n_noise + ni);
        PreparedCell cell;
        cell.train = inject_label_noise(train, cfg.noise_levels[ni], noise_seed);
        cell.test = cfg.noise_target == NoiseTarget::train_and_test
                        ? inject_label_noise(test, cfg.noise_levels[ni], noise_seed + 1)
                        : std::move(test);
        prepared[slot] = std::move(cell);
      } catch (const std::exception& e) {
        prepare_errors[slot] = e.what();
      }
    }
  }

  BenchmarkReport report;
  report.rows.resize(n_ds * n_noise * n_var);

  auto run_cell = [&](std::size_t cell_index) {
    const std::size_t vi = cell_index % n_var;
    const std::size_t ni = (cell_index / n_var) % n_noise;
    const std::size_t di = cell_index / (n_var * n_noise);
    BenchmarkRow& row = report.rows[cell_index];
    row.dataset = dataset_tag(cfg.dataset_paths[di], cfg.noise_levels[ni]);
    row.noise = cfg.noise_levels[ni];
    row.variant = cfg.variants[vi];
    row.kernel = cfg.kernel;

    const std::size_t slot = di * n_noise + ni;
    if (!prepared[slot]) {
      row.failed = true;
      row.error = prepare_errors[slot];
      return;
    }
    const PreparedCell& cell = *prepared[slot];
    try {
      const std::uint64_t search_seed = Rng::mix(cfg.seed, 7000 + cell_index);
      GridSearchResult gs = kfold_grid_search(cell.train, cfg.grid, cfg.folds, row.variant,
                                              cfg.kernel, search_seed, cfg.solver);
      const KernelSpec spec = cfg.kernel == KernelKind::gaussian
                                  ? KernelSpec::gaussian(gs.best.sigma)
                                  : KernelSpec::linear();
      const auto t0 = std::chrono::steady_clock::now();
      Model m = train_pipeline(cell.train, gs.best, row.variant, spec,
                               Rng::mix(cfg.seed, 9000 + cell_index), cfg.solver);
      const auto t1 = std::chrono::steady_clock::now();
      row.fit_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
      row.test_accuracy = accuracy(m.predict(cell.test.features), cell.test.labels);
      row.ball_count = m.train_ball_count();
      row.selected = gs.best;
      row.cv_accuracy = gs.cv_accuracy;
    } catch (const std::exception& e) {
      row.failed = true;
      row.error = e.what();
    }
  };

  const std::size_t total = report.rows.size();
  std::size_t workers = cfg.workers ? cfg.workers : std::thread::hardware_concurrency();
  if (workers == 0) workers = 1;
  workers = std::min(workers, total);
  if (workers <= 1) {
    for (std::size_t i = 0; i < total; ++i) run_cell(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < total; i = next.fetch_add(1)) run_cell(i);
      });
    }
    for (auto& t : pool) t.join();
  }

  for (const auto& row : report.rows)
    if (row.failed) ++report.failed_cells;
  if (report.failed_cells == report.rows.size())
    throw std::runtime_error("benchmark: every cell failed (first error: " +
                             report.rows.front().error + ")");

  // accuracy table over successful (dataset@noise) rows; a row enters only
  // when every variant produced a result, so the table stays complete
  for (const Variant v : cfg.variants) report.table.models.push_back(variant_name(v));
  std::vector<double> values;
  for (std::size_t di = 0; di < n_ds; ++di)
    for (std::size_t ni = 0; ni < n_noise; ++ni) {
      const std::size_t base = (di * n_noise + ni) * n_var;
      bool complete = true;
      for (std::size_t vi = 0; vi < n_var; ++vi) complete &= !report.rows[base + vi].failed;
      if (!complete) continue;
      report.table.datasets.push_back(report.rows[base].dataset);
      for (std::size_t vi = 0; vi < n_var; ++vi)
        values.push_back(report.rows[base + vi].test_accuracy);
    }
  report.table.acc = Matrix(report.table.datasets.size(), n_var);
  report.table.acc.data() = values;

  // results.csv: one detail record per cell
  {
    std::ofstream out(std::filesystem::path(cfg.out_dir) / "results.csv");
    if (!out) throw std::runtime_error("benchmark: cannot write results.csv");
    out << "dataset,noise,variant,kernel,accuracy,k,fit_ms,cv_accuracy,c1,c2,c3,c4,sigma,pur,num,"
           "status\n";
    char buf[64];
    for (const auto& row : report.rows) {
      out << row.dataset << ",";
      std::snprintf(buf, sizeof(buf), "%.2f", row.noise);
      out << buf << "," << variant_name(row.variant) << "," << kernel_name(row.kernel) << ",";
      if (row.failed) {
        out << ",,,,,,,,,,error:" << row.error << "\n";
        continue;
      }
      std::snprintf(buf, sizeof(buf), "%.6f", row.test_accuracy);
      out << buf << "," << row.ball_count << ",";
      std::snprintf(buf, sizeof(buf), "%.3f", row.fit_ms);
      out << buf << ",";
      std::snprintf(buf, sizeof(buf), "%.6f", row.cv_accuracy);
      out << buf << "," << format_g(row.selected.c1) << "," << format_g(row.selected.c2) << ","
          << format_g(row.selected.c3) << "," << format_g(row.selected.c4) << ","
          << format_g(row.selected.sigma) << "," << format_g(row.selected.pur) << ","
          << row.selected.num << ",ok\n";
    }
  }
  if (!report.table.datasets.empty()) {
    report.table.write_csv((std::filesystem::path(cfg.out_dir) / "accuracy_table.csv").string());
  }
  return report;
}

namespace {

double round_2dp(double v) { return std::round(v * 100.0) / 100.0; }

}  // namespace

StatsReport run_stats(const RunConfig& cfg) {
  if (cfg.stats_table.empty()) throw std::invalid_argument("stats: no accuracy table given");
  const AccuracyTable table = AccuracyTable::read_csv(cfg.stats_table);
  std::filesystem::create_directories(cfg.out_dir);

  StatsReport rep;
  rep.models = table.models;
  rep.ranks = average_ranks(table);
  rep.ranks_2dp = rep.ranks;
  for (double& r : rep.ranks_2dp) r = round_2dp(r);

  const double critical = cfg.friedman_critical.value_or(0.0);
  std::string friedman_error;
  if (table.models.size() >= 2 && table.datasets.size() >= 2) {
    try {
      rep.fr = friedman(rep.ranks, table.datasets.size(), critical);
      rep.fr_2dp = friedman(rep.ranks_2dp, table.datasets.size(), critical);
    } catch (const std::exception& e) {
      friedman_error = e.what();
    }
  } else {
    friedman_error = "friedman: need at least 2 models and 2 datasets";
  }

  const std::size_t l = table.models.size();
  for (std::size_t a = 0; a < l; ++a) {
    Vector col_a(table.datasets.size());
    for (std::size_t i = 0; i < col_a.size(); ++i) col_a[i] = table.acc(i, a);
    for (std::size_t b = 0; b < l; ++b) {
      if (a == b) continue;
      Vector col_b(table.datasets.size());
      for (std::size_t i = 0; i < col_b.size(); ++i) col_b[i] = table.acc(i, b);
      PairwiseStats ps;
      ps.model_a = table.models[a];
      ps.model_b = table.models[b];
      ps.wilcoxon = wilcoxon_signed_rank(col_a, col_b);
      ps.wtl = win_tie_loss(col_a, col_b);
      rep.pairwise.push_back(std::move(ps));
    }
  }

  char buf[64];
  // human-readable report
  {
    std::ofstream out(std::filesystem::path(cfg.out_dir) / "stats.txt");
    if (!out) throw std::runtime_error("stats: cannot write stats.txt");
    out << "Datasets: " << table.datasets.size() << "  Models: " << l << "\n\n";
    out << "Average ranks (rank 1 = best):\n";
    for (std::size_t j = 0; j < l; ++j) {
      std::snprintf(buf, sizeof(buf), "%10.4f", rep.ranks[j]);
      out << "  " << table.models[j] << ":" << buf << "\n";
    }
    out << "\nFriedman test:\n";
    if (friedman_error.empty()) {
      if (rep.fr.ff_defined)
        std::snprintf(buf, sizeof(buf), "  chi2 = %.4f  F_F = %.4f", rep.fr.chi2, rep.fr.ff);
      else
        std::snprintf(buf, sizeof(buf), "  chi2 = %.4f  F_F undefined (chi2 = M(l-1))",
                      rep.fr.chi2);
      out << buf << "\n";
      std::snprintf(buf, sizeof(buf), "  from 2-decimal ranks: chi2 = %.4f  F_F = %.4f",
                    rep.fr_2dp.chi2, rep.fr_2dp.ff);
      out << buf << "\n";
      if (cfg.friedman_critical) {
        out << "  null hypothesis " << (rep.fr.reject ? "rejected" : "not rejected")
            << " at critical value " << format_g(critical) << "\n";
      } else {
        out << "  (no critical value supplied; pass one to get a reject decision)\n";
      }
    } else {
      out << "  " << friedman_error << "\n";
    }
    out << "\nPairwise Wilcoxon signed rank / win-tie-loss (row vs column):\n";
    for (const auto& ps : rep.pairwise) {
      std::snprintf(buf, sizeof(buf), "R+ = %.1f  R- = %.1f  p = %.6g", ps.wilcoxon.r_plus,
                    ps.wilcoxon.r_minus, ps.wilcoxon.p_value);
      out << "  " << ps.model_a << " vs " << ps.model_b << ": " << buf << "  [" << ps.wtl.raw_wins
          << ", " << ps.wtl.raw_ties << ", " << ps.wtl.raw_losses << "]";
      std::snprintf(buf, sizeof(buf), "  threshold %.2f", ps.wtl.significance_threshold);
      out << buf << "\n";
    }
  }
  // machine-readable key=value records
  {
    std::ofstream out(std::filesystem::path(cfg.out_dir) / "stats.kv");
    if (!out) throw std::runtime_error("stats: cannot write stats.kv");
    out << "datasets=" << table.datasets.size() << "\nmodels=" << l << "\n";
    for (std::size_t j = 0; j < l; ++j)
      out << "rank." << table.models[j] << "=" << format_g(rep.ranks[j]) << "\n";
    if (friedman_error.empty()) {
      out << "friedman.chi2=" << format_g(rep.fr.chi2) << "\n";
      if (rep.fr.ff_defined)
        out << "friedman.ff=" << format_g(rep.fr.ff) << "\n";
      else
        out << "friedman.ff=undefined\n";
      out << "friedman.chi2_2dp=" << format_g(rep.fr_2dp.chi2) << "\n";
      out << "friedman.ff_2dp=" << format_g(rep.fr_2dp.ff) << "\n";
      if (cfg.friedman_critical) out << "friedman.reject=" << (rep.fr.reject ? 1 : 0) << "\n";
    } else {
      out << "friedman.error=" << friedman_error << "\n";
    }
    for (const auto& ps : rep.pairwise) {
      const std::string key = ps.model_a + "_vs_" + ps.model_b;
      out << "wilcoxon." << key << ".r_plus=" << format_g(ps.wilcoxon.r_plus) << "\n";
      out << "wilcoxon." << key << ".r_minus=" << format_g(ps.wilcoxon.r_minus) << "\n";
      out << "wilcoxon." << key << ".p=" << format_g(ps.wilcoxon.p_value) << "\n";
      out << "wtl." << key << "=" << ps.wtl.raw_wins << "," << ps.wtl.raw_ties << ","
          << ps.wtl.raw_losses << "\n";
      out << "wtl." << key << ".threshold=" << format_g(ps.wtl.significance_threshold) << "\n";
    }
  }
  return rep;
}

}  // namespace gblstsvm
