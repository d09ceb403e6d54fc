#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "gblstsvm/harness.hpp"
#include "gblstsvm/rng.hpp"

namespace {

using namespace gblstsvm;

struct HyperFlags {
  std::vector<double> c1, c2, c3, c4, sigma, pur;
  std::vector<std::size_t> num;
  std::string preset = "coarse";

  void add_to(CLI::App* cmd) {
    cmd->add_option("--grid", preset, "Grid preset: paper, coarse, or point")
        ->check(CLI::IsMember({"paper", "coarse", "point"}));
    cmd->add_option("--c1", c1, "c1 values (overrides the preset list)");
    cmd->add_option("--c2", c2, "c2 values (default: tied to c1)");
    cmd->add_option("--c3", c3, "c3 values (overrides the preset list)");
    cmd->add_option("--c4", c4, "c4 values (default: tied to c3)");
    cmd->add_option("--sigma", sigma, "Gaussian widths");
    cmd->add_option("--pur", pur, "purity thresholds in (0.5, 1]");
    cmd->add_option("--num", num, "minimum ball counts (>= 2)");
  }

  HyperGrid build() const {
    HyperGrid g;
    if (preset == "paper")
      g = HyperGrid::paper_defaults();
    else if (preset == "coarse")
      g = HyperGrid::coarse();
    else {
      g.c1 = {1.0};
      g.c3 = {1.0};
      g.sigma = {1.0};
      g.pur = {0.95};
      g.num = {2};
    }
    if (!c1.empty()) g.c1 = c1;
    if (!c2.empty()) g.c2 = c2;
    if (!c3.empty()) g.c3 = c3;
    if (!c4.empty()) g.c4 = c4;
    if (!sigma.empty()) g.sigma = sigma;
    if (!pur.empty()) g.pur = pur;
    if (!num.empty()) g.num = num;
    return g;
  }
};

KernelKind parse_kernel(const std::string& name) {
  return name == "gaussian" ? KernelKind::gaussian : KernelKind::linear;
}

int cmd_gen_data(const std::string& type, std::size_t n, std::size_t dim, double separation,
                 double jitter, std::uint64_t seed, const std::string& out) {
  Dataset d;
  if (type == "crossplane")
    d = gen_crossplane(n, jitter, seed);
  else
    d = gen_ndc(n, dim, separation, seed);
  save_csv(d, out);
  std::cout << "wrote " << d.size() << " x " << d.dim() << " dataset to " << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"granular-ball least-squares twin SVM toolkit"};
  app.require_subcommand(1);

  // gen-data ---------------------------------------------------------------
  auto* gen = app.add_subcommand("gen-data", "generate a synthetic dataset CSV");
  std::string gen_type = "ndc";
  std::size_t gen_n = 1000, gen_dim = 2;
  double gen_separation = 4.0, gen_jitter = 0.01;
  std::uint64_t gen_seed = 0;
  std::string gen_out = "data.csv";
  gen->add_option("--type", gen_type, "crossplane or ndc")
      ->check(CLI::IsMember({"crossplane", "ndc"}));
  gen->add_option("--n", gen_n, "sample count");
  gen->add_option("--dim", gen_dim, "feature count (ndc only)");
  gen->add_option("--separation", gen_separation, "class separation in cluster sigmas (ndc)");
  gen->add_option("--jitter", gen_jitter, "point jitter (crossplane)");
  gen->add_option("--seed", gen_seed, "random seed");
  gen->add_option("--out", gen_out, "output CSV path")->required();

  // train -------------------------------------------------------------------
  auto* train = app.add_subcommand("train", "fit a model on a CSV dataset");
  std::string train_data, train_variant = "gblstsvm", train_kernel = "linear";
  std::string train_out = "model.txt", train_dump_balls;
  std::uint64_t train_seed = 0;
  bool train_no_normalize = false, train_search = false;
  std::size_t train_folds = 5;
  long long train_label_col = -1;
  std::size_t train_workers = 0;
  HyperFlags train_hp;
  train->add_option("--data", train_data, "training CSV")->required();
  train->add_option("--variant", train_variant)
      ->check(CLI::IsMember({"lstsvm", "gblstsvm", "lsgblstsvm"}));
  train->add_option("--kernel", train_kernel)->check(CLI::IsMember({"linear", "gaussian"}));
  train->add_option("--seed", train_seed, "random seed");
  train->add_option("--out", train_out, "model file path");
  train->add_option("--label-column", train_label_col, "label column index (default: last)");
  train->add_flag("--no-normalize", train_no_normalize, "skip min-max scaling");
  train->add_flag("--search", train_search, "grid-search hyperparameters by k-fold CV");
  train->add_option("--folds", train_folds, "CV folds for --search");
  train->add_option("--workers", train_workers, "threads for --search (0 = hardware)");
  train->add_option("--dump-balls", train_dump_balls,
                    "write the training ball covering to this CSV (ball variants)");
  train_hp.add_to(train);

  // predict ------------------------------------------------------------------
  auto* predict = app.add_subcommand("predict", "classify a CSV with a saved model");
  std::string pred_model, pred_data, pred_out;
  long long pred_label_col = -1;
  predict->add_option("--model", pred_model, "model file")->required();
  predict->add_option("--data", pred_data, "CSV to classify (labels used for accuracy)")
      ->required();
  predict->add_option("--out", pred_out, "write predictions CSV here");
  predict->add_option("--label-column", pred_label_col, "label column index (default: last)");

  // benchmark ------------------------------------------------------------------
  auto* bench = app.add_subcommand("benchmark", "grid-search + evaluate variants over datasets");
  RunConfig cfg;
  std::vector<std::string> bench_variants = {"lstsvm", "gblstsvm", "lsgblstsvm"};
  std::string bench_kernel = "linear", bench_noise_target = "train";
  bool bench_no_normalize = false;
  HyperFlags bench_hp;
  double bench_critical = 0.0;
  long long bench_label_col = -1;
  bench->add_option("--data", cfg.dataset_paths, "dataset CSVs")->required()->expected(-1);
  bench->add_option("--label-column", bench_label_col, "label column index (default: last)");
  bench->add_option("--variant", bench_variants, "model variants to run")
      ->check(CLI::IsMember({"lstsvm", "gblstsvm", "lsgblstsvm"}));
  bench->add_option("--kernel", bench_kernel)->check(CLI::IsMember({"linear", "gaussian"}));
  bench->add_option("--noise", cfg.noise_levels, "training label-noise rates in [0, 0.5]");
  bench->add_option("--noise-target", bench_noise_target, "which split gets label noise")
      ->check(CLI::IsMember({"train", "both"}));
  bench->add_option("--train-fraction", cfg.train_fraction);
  bench->add_option("--folds", cfg.folds, "CV folds for the grid search");
  bench->add_option("--seed", cfg.seed, "random seed");
  bench->add_option("--out", cfg.out_dir, "output directory");
  bench->add_option("--workers", cfg.workers, "max concurrent cells (0 = hardware)");
  bench->add_flag("--no-normalize", bench_no_normalize, "skip min-max scaling");
  bench->add_option("--f-critical", bench_critical, "Friedman critical value for stats");
  bench_hp.add_to(bench);

  // stats -----------------------------------------------------------------------
  auto* stats = app.add_subcommand("stats", "rank/Friedman/Wilcoxon/win-tie-loss over a table");
  std::string stats_table, stats_out = ".";
  double stats_critical = 0.0;
  stats->add_option("--table", stats_table, "accuracy table CSV (datasets x models)")->required();
  stats->add_option("--out", stats_out, "output directory");
  stats->add_option("--f-critical", stats_critical, "Friedman critical value");

  // documentation entries only; the tokens are consumed before parsing
  for (CLI::App* cmd : {gen, train, predict, bench, stats})
    cmd->add_option("--config", "flat key=value config file; flags override it")->expected(1);

  // Flat key=value config support: --config FILE expands into trailing
  // arguments, skipping any key the command line already sets (flags win).
  // Repeated keys build up list options; values may also hold
  // space-separated lists.
  std::vector<std::string> args(argv + 1, argv + argc);
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::string file;
    std::size_t span = 0;
    if (args[i] == "--config" && i + 1 < args.size()) {
      file = args[i + 1];
      span = 2;
    } else if (args[i].rfind("--config=", 0) == 0) {
      file = args[i].substr(9);
      span = 1;
    }
    if (span == 0) continue;
    std::ifstream in(file);
    if (!in) {
      std::fprintf(stderr, "error: cannot open config file %s\n", file.c_str());
      return 1;
    }
    std::set<std::string> given;
    for (const auto& a : args)
      if (a.rfind("--", 0) == 0) given.insert(a.substr(0, a.find('=')));
    args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
               args.begin() + static_cast<std::ptrdiff_t>(i + span));
    std::string line;
    std::vector<std::string> extra;
    while (std::getline(in, line)) {
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
      };
      const std::string key = "--" + trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key == "--" || given.count(key)) continue;
      extra.push_back(key);
      std::stringstream vs(value);
      std::string tok;
      while (vs >> tok) extra.push_back(tok);
    }
    args.insert(args.end(), extra.begin(), extra.end());
    break;
  }

  try {
    std::vector<const char*> cargs;
    cargs.push_back(argv[0]);
    for (const auto& a : args) cargs.push_back(a.c_str());
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (gen->parsed()) {
      return cmd_gen_data(gen_type, gen_n, gen_dim, gen_separation, gen_jitter, gen_seed, gen_out);
    }

    if (train->parsed()) {
      CsvOptions copts;
      if (train_label_col >= 0) copts.label_column = static_cast<std::size_t>(train_label_col);
      Dataset d = load_csv(train_data, copts);
      NormParams params;
      if (!train_no_normalize) {
        auto [nd, np] = minmax_normalize(d);
        d = std::move(nd);
        params = std::move(np);
      }
      const Variant variant = variant_from_name(train_variant);
      const KernelKind kind = parse_kernel(train_kernel);
      const HyperGrid grid = train_hp.build();
      HyperParams hp;
      if (train_search) {
        const std::size_t workers =
            train_workers ? train_workers : std::thread::hardware_concurrency();
        GridSearchResult gs =
            kfold_grid_search(d, grid, train_folds, variant, kind, train_seed, {}, workers);
        hp = gs.best;
        std::printf("grid search: best CV accuracy %.4f over %zu points\n", gs.cv_accuracy,
                    gs.evaluated);
      } else {
        const auto pts = grid.enumerate(variant, kind);
        hp = pts.front();
      }
      const KernelSpec spec =
          kind == KernelKind::gaussian ? KernelSpec::gaussian(hp.sigma) : KernelSpec::linear();
      const auto t0 = std::chrono::steady_clock::now();
      Model m = train_pipeline(d, hp, variant, spec, train_seed);
      const auto t1 = std::chrono::steady_clock::now();
      if (!train_no_normalize) m.set_normalization(std::move(params));
      m.save(train_out);
      if (!train_dump_balls.empty() && variant != Variant::lstsvm) {
        save_ballset_csv(generate_balls(d, hp.pur, hp.num, train_seed), train_dump_balls);
        std::printf("ball covering written to %s\n", train_dump_balls.c_str());
      }
      std::printf("trained %s (%s) on %zu samples: k = %zu balls, fit %.2f ms, train acc %.4f\n",
                  train_variant.c_str(), train_kernel.c_str(), d.size(), m.train_ball_count(),
                  std::chrono::duration<double, std::milli>(t1 - t0).count(),
                  accuracy(m.predict(d.features), d.labels));
      std::printf("model written to %s\n", train_out.c_str());
      return 0;
    }

    if (predict->parsed()) {
      const Model m = Model::load(pred_model);
      CsvOptions copts;
      if (pred_label_col >= 0) copts.label_column = static_cast<std::size_t>(pred_label_col);
      const Dataset d = load_csv(pred_data, copts);
      // predict() applies any scaling stored in the model, so raw features go in
      const std::vector<int> pred = m.predict(d.features);
      if (!pred_out.empty()) {
        std::ofstream out(pred_out);
        if (!out) throw std::runtime_error("predict: cannot open " + pred_out);
        out << "prediction\n";
        for (int y : pred) out << y << "\n";
      } else {
        for (int y : pred) std::cout << y << "\n";
      }
      std::printf("accuracy %.4f on %zu samples\n", accuracy(pred, d.labels), d.size());
      return 0;
    }

    if (bench->parsed()) {
      if (bench_label_col >= 0) cfg.label_column = static_cast<std::size_t>(bench_label_col);
      cfg.kernel = parse_kernel(bench_kernel);
      cfg.normalize = !bench_no_normalize;
      cfg.noise_target =
          bench_noise_target == "both" ? NoiseTarget::train_and_test : NoiseTarget::train_only;
      cfg.grid = bench_hp.build();
      cfg.variants.clear();
      for (const auto& v : bench_variants) cfg.variants.push_back(variant_from_name(v));
      if (bench_critical > 0.0) cfg.friedman_critical = bench_critical;
      BenchmarkReport report = run_benchmark(cfg);
      std::printf("benchmark: %zu cells, %zu failed; outputs in %s\n", report.rows.size(),
                  report.failed_cells, cfg.out_dir.c_str());
      for (const auto& row : report.rows) {
        if (row.failed) {
          std::printf("  %s %s: FAILED (%s)\n", row.dataset.c_str(),
                      variant_name(row.variant).c_str(), row.error.c_str());
        } else {
          std::printf("  %s %s: acc %.4f k=%zu fit %.1f ms\n", row.dataset.c_str(),
                      variant_name(row.variant).c_str(), row.test_accuracy, row.ball_count,
                      row.fit_ms);
        }
      }
      return report.failed_cells == report.rows.size() ? 1 : 0;
    }

    if (stats->parsed()) {
      RunConfig scfg;
      scfg.stats_table = stats_table;
      scfg.out_dir = stats_out;
      if (stats_critical > 0.0) scfg.friedman_critical = stats_critical;
      StatsReport rep = run_stats(scfg);
      std::printf("stats over %zu models: ", rep.models.size());
      for (std::size_t i = 0; i < rep.models.size(); ++i)
        std::printf("%s%s=%.2f", i ? ", " : "", rep.models[i].c_str(), rep.ranks[i]);
      std::printf("\nreports written to %s\n", stats_out.c_str());
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
