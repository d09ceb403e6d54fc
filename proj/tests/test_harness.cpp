#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "gblstsvm/harness.hpp"
#include "gblstsvm/rng.hpp"

using namespace gblstsvm;

namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::vector<std::string> make_bench_datasets(const fs::path& dir) {
  const Dataset a = gen_ndc(120, 3, 4.0, 11);
  const Dataset b = gen_crossplane(80, 0.02, 12);
  const auto pa = dir / "ndc_small.csv";
  const auto pb = dir / "cross_small.csv";
  save_csv(a, pa.string());
  save_csv(b, pb.string());
  return {pa.string(), pb.string()};
}

RunConfig small_config(const fs::path& work) {
  RunConfig cfg;
  cfg.dataset_paths = make_bench_datasets(work);
  cfg.variants = {Variant::lstsvm, Variant::gblstsvm};
  cfg.noise_levels = {0.0, 0.2};
  cfg.seed = 5;
  cfg.out_dir = (work / "out").string();
  HyperGrid g;
  g.c1 = {1e-3, 1.0};
  g.c3 = {1.0};
  g.sigma = {1.0};
  g.pur = {0.95};
  g.num = {2};
  cfg.grid = g;
  return cfg;
}

}  // namespace

TEST_CASE("benchmark emits the full cell grid with sane fields") {
  const fs::path work = fresh_dir("gbl_bench1");
  RunConfig cfg = small_config(work);
  const BenchmarkReport rep = run_benchmark(cfg);

  REQUIRE(rep.rows.size() == 8);  // 2 datasets x 2 noise x 2 variants
  CHECK(rep.failed_cells == 0);
  for (const auto& row : rep.rows) {
    CHECK(row.test_accuracy >= 0.0);
    CHECK(row.test_accuracy <= 1.0);
    CHECK(row.ball_count >= 1);
    CHECK(row.ball_count <= 120);
    CHECK(row.fit_ms > 0.0);
  }
  CHECK(fs::exists(fs::path(cfg.out_dir) / "results.csv"));
  CHECK(fs::exists(fs::path(cfg.out_dir) / "accuracy_table.csv"));
  CHECK(rep.table.datasets.size() == 4);  // dataset x noise rows
  CHECK(rep.table.models.size() == 2);
}

TEST_CASE("benchmark accuracy table is byte-identical across reruns") {
  const fs::path work = fresh_dir("gbl_bench2");
  RunConfig cfg = small_config(work);
  run_benchmark(cfg);
  const std::string first = slurp(fs::path(cfg.out_dir) / "accuracy_table.csv");

  cfg.out_dir = (work / "out2").string();
  run_benchmark(cfg);
  const std::string second = slurp(fs::path(cfg.out_dir) / "accuracy_table.csv");
  CHECK(first == second);
  CHECK(!first.empty());
}

TEST_CASE("benchmark skips bad datasets and fails only when all do") {
  const fs::path work = fresh_dir("gbl_bench3");
  RunConfig cfg = small_config(work);
  cfg.dataset_paths.push_back((work / "missing.csv").string());
  const BenchmarkReport rep = run_benchmark(cfg);
  CHECK(rep.failed_cells == 4);  // the missing dataset's cells
  CHECK(rep.table.datasets.size() == 4);

  RunConfig all_bad = cfg;
  all_bad.dataset_paths = {(work / "missing.csv").string()};
  all_bad.out_dir = (work / "out3").string();
  CHECK_THROWS(run_benchmark(all_bad));
}

TEST_CASE("noise goes into the training side only by default") {
  // with a fully separable dataset and clean test labels, even 20% train
  // noise keeps test accuracy high; corrupting the test side would cap it
  // near 80%
  const fs::path work = fresh_dir("gbl_bench4");
  RunConfig cfg = small_config(work);
  cfg.dataset_paths = {cfg.dataset_paths[0]};  // well-separated ndc
  cfg.variants = {Variant::gblstsvm};
  cfg.noise_levels = {0.2};
  const BenchmarkReport rep = run_benchmark(cfg);
  REQUIRE(rep.rows.size() == 1);
  CHECK(rep.rows[0].test_accuracy >= 0.9);
}

TEST_CASE("run_stats reproduces published statistics from the fixture table") {
  const fs::path work = fresh_dir("gbl_stats1");
  RunConfig cfg;
  cfg.stats_table = std::string(GBLSTSVM_FIXTURE_DIR) + "/table_s2_linear_0noise.csv";
  cfg.out_dir = (work / "out").string();
  cfg.friedman_critical = 2.2689;
  const StatsReport rep = run_stats(cfg);

  REQUIRE(rep.models.size() == 6);
  // published rank row: 3.88, 5.26, 5.15, 2.59, 1.62, 2.50
  const Vector expected = {3.88, 5.26, 5.15, 2.59, 1.62, 2.50};
  for (std::size_t j = 0; j < 6; ++j) CHECK(std::fabs(rep.ranks[j] - expected[j]) <= 0.005);

  // the published chi2 comes from the rounded ranks
  CHECK(std::fabs(rep.fr_2dp.chi2 - 110.03) <= 0.01);
  CHECK(std::fabs(rep.fr_2dp.ff - 60.54) <= 0.05);
  CHECK(rep.fr.reject);

  // svm (col 0) vs gblstsvm (col 4)
  bool found = false;
  for (const auto& ps : rep.pairwise) {
    if (ps.model_a == "gblstsvm" && ps.model_b == "svm") {
      found = true;
      CHECK(ps.wilcoxon.r_plus == doctest::Approx(465.0));
      CHECK(ps.wilcoxon.r_minus == doctest::Approx(0.0));
      CHECK(ps.wilcoxon.p_value == doctest::Approx(1.819e-6).epsilon(0.5));
      CHECK(ps.wtl.significance_threshold == doctest::Approx(22.71).epsilon(0.001));
    }
  }
  CHECK(found);
  CHECK(fs::exists(fs::path(cfg.out_dir) / "stats.txt"));
  CHECK(fs::exists(fs::path(cfg.out_dir) / "stats.kv"));
}

TEST_CASE("run_stats handles degenerate tables") {
  const fs::path work = fresh_dir("gbl_stats2");
  // single-model table: ranks all 1, friedman unavailable
  {
    AccuracyTable t;
    t.models = {"only"};
    t.datasets = {"a", "b"};
    t.acc = Matrix(2, 1, 0.5);
    const auto path = (work / "single.csv").string();
    t.write_csv(path);
    RunConfig cfg;
    cfg.stats_table = path;
    cfg.out_dir = (work / "out1").string();
    const StatsReport rep = run_stats(cfg);
    CHECK(rep.ranks[0] == doctest::Approx(1.0));
    const std::string kv = slurp(fs::path(cfg.out_dir) / "stats.kv");
    CHECK(kv.find("friedman.error=") != std::string::npos);
  }
  // two identical columns: wilcoxon p = 1
  {
    AccuracyTable t;
    t.models = {"a", "b"};
    t.datasets = {"d1", "d2", "d3"};
    t.acc = Matrix(3, 2, 0.75);
    const auto path = (work / "same.csv").string();
    t.write_csv(path);
    RunConfig cfg;
    cfg.stats_table = path;
    cfg.out_dir = (work / "out2").string();
    const StatsReport rep = run_stats(cfg);
    REQUIRE(!rep.pairwise.empty());
    CHECK(rep.pairwise[0].wilcoxon.p_value == doctest::Approx(1.0));
  }
}

TEST_CASE("worker pool produces the same report as sequential execution") {
  const fs::path work = fresh_dir("gbl_bench5");
  RunConfig cfg = small_config(work);
  cfg.workers = 1;
  const BenchmarkReport seq = run_benchmark(cfg);
  cfg.workers = 4;
  cfg.out_dir = (work / "out_mt").string();
  const BenchmarkReport par = run_benchmark(cfg);
  REQUIRE(seq.rows.size() == par.rows.size());
  for (std::size_t i = 0; i < seq.rows.size(); ++i) {
    CHECK(seq.rows[i].test_accuracy == par.rows[i].test_accuracy);
    CHECK(seq.rows[i].ball_count == par.rows[i].ball_count);
    CHECK(seq.rows[i].selected.c1 == par.rows[i].selected.c1);
  }
}
