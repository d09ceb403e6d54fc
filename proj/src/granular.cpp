#include "gblstsvm/granular.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "gblstsvm/rng.hpp"
#include "gblstsvm/simd.hpp"

namespace gblstsvm {

double purity(std::span<const int> labels) {
  if (labels.empty()) throw std::invalid_argument("purity: empty member set");
  std::size_t pos = 0;
  for (int y : labels) pos += y > 0;
  const std::size_t maj = std::max(pos, labels.size() - pos);
  return static_cast<double>(maj) / static_cast<double>(labels.size());
}

GranularBall ball_from_members(const Matrix& points, std::span<const std::size_t> rows,
                               std::span<const int> labels) {
  if (rows.empty()) throw std::invalid_argument("ball_from_members: empty member set");
  const std::size_t n = points.cols();
  GranularBall b;
  b.size = rows.size();
  b.member_indices.assign(rows.begin(), rows.end());
  b.center.assign(n, 0.0);
  std::size_t pos = 0;
  for (std::size_t r : rows) {
    simd::axpy(1.0, points.row(r), b.center.data(), n);
    pos += labels[r] > 0;
  }
  const double inv = 1.0 / static_cast<double>(rows.size());
  for (double& v : b.center) v *= inv;
  double dist = 0.0;
  for (std::size_t r : rows)
    dist += std::sqrt(simd::squared_distance(points.row(r), b.center.data(), n));
  b.radius = dist * inv;
  const std::size_t neg = rows.size() - pos;
  b.label = pos >= neg ? 1 : -1;  // tie -> +1
  b.purity = static_cast<double>(std::max(pos, neg)) / static_cast<double>(rows.size());
  return b;
}

GranularBall ball_from_members(const Matrix& points, std::span<const int> labels) {
  std::vector<std::size_t> rows(points.rows());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return ball_from_members(points, rows, labels);
}

namespace {

/// Lloyd rounds for two centroids over `rows`; writes the final assignment
/// and returns the side-0 count. A few iterations with a movement-based
/// early exit (stop once both centroids move < 1% of their separation in
/// one update) refine a splitting heuristic, not an exact clusterer.
std::size_t lloyd_two(const Matrix& points, std::span<const std::size_t> rows, Vector& c0,
                      Vector& c1, std::vector<std::uint8_t>& assign) {
  const std::size_t p = rows.size();
  const std::size_t n = points.cols();
  const double* base = points.row(0);
  std::vector<std::uint8_t> prev(p, 255);
  Vector diff(n), next0(n), next1(n);
  std::size_t n0 = 0;

  constexpr int kMaxIter = 10;
  constexpr double kMoveTolSq = 1e-4;
  for (int iter = 0; iter < kMaxIter; ++iter) {
    // point belongs to c0 iff x.(c0-c1) >= (|c0|^2-|c1|^2)/2; assignment and
    // per-side sums come out of one fused pass
    for (std::size_t j = 0; j < n; ++j) diff[j] = c0[j] - c1[j];
    const double threshold =
        0.5 * (simd::dot(c0.data(), c0.data(), n) - simd::dot(c1.data(), c1.data(), n));
    next0.assign(n, 0.0);
    next1.assign(n, 0.0);
    n0 = simd::assign_accumulate_halves(base, rows.data(), p, n, diff.data(), threshold,
                                        assign.data(), next0.data(), next1.data());
    if (n0 == 0 || n0 == p) {
      // move the point farthest from the surviving centroid into the empty
      // cluster
      const Vector& ref = n0 == 0 ? c1 : c0;
      std::size_t far = 0;
      double fd = -1.0;
      for (std::size_t i = 0; i < p; ++i) {
        const double d = simd::squared_distance(points.row(rows[i]), ref.data(), n);
        if (d > fd) {
          fd = d;
          far = i;
        }
      }
      const double* frow = points.row(rows[far]);
      if (n0 == 0) {
        assign[far] = 0;
        for (std::size_t j = 0; j < n; ++j) {
          next0[j] += frow[j];
          next1[j] -= frow[j];
        }
        n0 = 1;
      } else {
        assign[far] = 1;
        for (std::size_t j = 0; j < n; ++j) {
          next1[j] += frow[j];
          next0[j] -= frow[j];
        }
        n0 = p - 1;
      }
    }
    if (assign == prev) break;
    prev = assign;
    for (double& v : next0) v /= static_cast<double>(n0);
    for (double& v : next1) v /= static_cast<double>(p - n0);
    const double moved = simd::squared_distance(next0.data(), c0.data(), n) +
                         simd::squared_distance(next1.data(), c1.data(), n);
    c0.swap(next0);
    c1.swap(next1);
    const double scale = simd::squared_distance(c0.data(), c1.data(), n);
    if (moved <= kMoveTolSq * scale) break;
  }
  return n0;
}

}  // namespace

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_two_means(
    const Matrix& points, std::span<const std::size_t> rows, std::uint64_t seed) {
  const std::size_t p = rows.size();
  if (p < 2) throw std::invalid_argument("split_two_means: need at least two points");
  const std::size_t n = points.cols();
  const double* base = points.row(0);
  Rng rng(seed);

  // centroid refinement runs on at most this many members; larger balls get
  // a seeded subsample for the Lloyd rounds and a single full assignment
  // pass at the end (mini-batch-style splitting)
  constexpr std::size_t kRefineCap = 4096;

  // initial centroids: mutually farthest members; exact for small balls,
  // seeded pair sampling for large ones
  std::size_t ia = 0, ib = 1;
  double best = -1.0;
  auto consider = [&](std::size_t u, std::size_t v) {
    const double d = simd::squared_distance(points.row(rows[u]), points.row(rows[v]), n);
    if (d > best) {
      best = d;
      ia = u;
      ib = v;
    }
  };
  if (p <= 48) {
    for (std::size_t u = 0; u < p; ++u)
      for (std::size_t v = u + 1; v < p; ++v) consider(u, v);
  } else {
    for (int t = 0; t < 192; ++t) {
      const std::size_t u = rng.uniform_index(p);
      std::size_t v = rng.uniform_index(p - 1);
      if (v >= u) ++v;
      consider(u, v);
    }
  }

  Vector c0(points.row(rows[ia]), points.row(rows[ia]) + n);
  Vector c1(points.row(rows[ib]), points.row(rows[ib]) + n);
  std::vector<std::uint8_t> assign(p, 0);

  if (p <= kRefineCap) {
    lloyd_two(points, rows, c0, c1, assign);
  } else {
    // seeded partial Fisher-Yates picks the refinement subsample
    std::vector<std::size_t> pos(p);
    std::iota(pos.begin(), pos.end(), std::size_t{0});
    for (std::size_t i = 0; i < kRefineCap; ++i) {
      const std::size_t j = i + rng.uniform_index(p - i);
      std::swap(pos[i], pos[j]);
    }
    std::vector<std::size_t> sample(kRefineCap);
    for (std::size_t i = 0; i < kRefineCap; ++i) sample[i] = rows[pos[i]];
    std::sort(sample.begin(), sample.end());
    std::vector<std::uint8_t> sub_assign(kRefineCap, 0);
    lloyd_two(points, sample, c0, c1, sub_assign);

    // one full assignment pass against the refined centroids
    Vector diff(n);
    for (std::size_t j = 0; j < n; ++j) diff[j] = c0[j] - c1[j];
    const double threshold =
        0.5 * (simd::dot(c0.data(), c0.data(), n) - simd::dot(c1.data(), c1.data(), n));
    std::size_t n0 =
        simd::assign_halves(base, rows.data(), p, n, diff.data(), threshold, assign.data());
    if (n0 == 0 || n0 == p) {
      const Vector& ref = n0 == 0 ? c1 : c0;
      std::size_t far = 0;
      double fd = -1.0;
      for (std::size_t i = 0; i < p; ++i) {
        const double d = simd::squared_distance(points.row(rows[i]), ref.data(), n);
        if (d > fd) {
          fd = d;
          far = i;
        }
      }
      assign[far] = n0 == 0 ? 0 : 1;
    }
  }

  std::pair<std::vector<std::size_t>, std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < p; ++i) {
    (assign[i] == 0 ? out.first : out.second).push_back(i);
  }
  return out;
}

namespace {

struct PendingBall {
  std::vector<std::size_t> members;  // dataset row indices, sorted
  std::size_t positives = 0;

  std::size_t size() const { return members.size(); }
  double ball_purity() const {
    const std::size_t maj = std::max(positives, size() - positives);
    return static_cast<double>(maj) / static_cast<double>(size());
  }
  int majority_label() const { return positives >= size() - positives ? 1 : -1; }
};

PendingBall make_pending(const Dataset& d, std::vector<std::size_t> members) {
  PendingBall b;
  b.members = std::move(members);
  for (std::size_t r : b.members) b.positives += d.labels[r] > 0;
  return b;
}

std::pair<PendingBall, PendingBall> split_pending(const Dataset& d, const PendingBall& b,
                                                  std::uint64_t seed) {
  auto [left, right] = split_two_means(d.features, b.members, seed);
  std::vector<std::size_t> lm, rm;
  lm.reserve(left.size());
  rm.reserve(right.size());
  for (std::size_t i : left) lm.push_back(b.members[i]);
  for (std::size_t i : right) rm.push_back(b.members[i]);
  return {make_pending(d, std::move(lm)), make_pending(d, std::move(rm))};
}

}  // namespace

BallSet generate_balls(const Dataset& d, double pur, std::size_t num, std::uint64_t seed) {
  d.validate();
  if (!(pur > 0.5 && pur <= 1.0))
    throw std::invalid_argument("generate_balls: purity threshold must be in (0.5, 1]");
  if (num < 2) throw std::invalid_argument("generate_balls: num must be >= 2");

  std::uint64_t split_counter = 0;
  auto next_seed = [&] { return Rng::mix(seed, split_counter++); };

  std::vector<std::size_t> all(d.size());
  std::iota(all.begin(), all.end(), std::size_t{0});

  // phase 1: split until every ball is pure enough or a singleton
  std::deque<PendingBall> work;
  work.push_back(make_pending(d, std::move(all)));
  std::vector<PendingBall> done;
  auto process = [&](std::deque<PendingBall>& queue) {
    while (!queue.empty()) {
      PendingBall b = std::move(queue.front());
      queue.pop_front();
      if (b.size() >= 2 && b.ball_purity() < pur) {
        auto [l, r] = split_pending(d, b, next_seed());
        queue.push_back(std::move(l));
        queue.push_back(std::move(r));
      } else {
        done.push_back(std::move(b));
      }
    }
  };
  process(work);

  // picks the largest splittable ball, preferring earlier creation on ties;
  // the filter restricts candidates (e.g. to balls holding a given label)
  auto largest_splittable = [&](auto&& eligible) -> std::ptrdiff_t {
    std::ptrdiff_t best = -1;
    for (std::size_t i = 0; i < done.size(); ++i) {
      if (done[i].size() < 2 || !eligible(done[i])) continue;
      if (best < 0 || done[i].size() > done[best].size()) {
        best = static_cast<std::ptrdiff_t>(i);
      }
    }
    return best;
  };
  // splits a finalized ball, re-running the purity loop on the children
  // (a child of a rho-pure ball can fall below rho)
  auto split_at = [&](std::size_t idx) {
    PendingBall b = std::move(done[idx]);
    done.erase(done.begin() + static_cast<std::ptrdiff_t>(idx));
    std::deque<PendingBall> local;
    {
      auto [l, r] = split_pending(d, b, next_seed());
      local.push_back(std::move(l));
      local.push_back(std::move(r));
    }
    process(local);
  };

  // phase 2: enforce the minimum ball count
  while (done.size() < num) {
    const auto idx = largest_splittable([](const PendingBall&) { return true; });
    if (idx < 0) break;  // nothing splittable; count is capped at m
    split_at(static_cast<std::size_t>(idx));
  }

  // phase 3: each class present in the data must own at least one ball
  const bool has_pos = std::any_of(d.labels.begin(), d.labels.end(), [](int y) { return y > 0; });
  const bool has_neg = std::any_of(d.labels.begin(), d.labels.end(), [](int y) { return y < 0; });
  auto class_missing = [&](int label) {
    if (label > 0 && !has_pos) return false;
    if (label < 0 && !has_neg) return false;
    return std::none_of(done.begin(), done.end(),
                        [&](const PendingBall& b) { return b.majority_label() == label; });
  };
  for (int label : {1, -1}) {
    while (class_missing(label)) {
      const auto idx = largest_splittable([&](const PendingBall& b) {
        const std::size_t count = label > 0 ? b.positives : b.size() - b.positives;
        return count > 0;
      });
      if (idx < 0) break;
      split_at(static_cast<std::size_t>(idx));
    }
  }

  BallSet bs;
  bs.balls.reserve(done.size());
  bs.C = Matrix(0, d.dim());
  bs.D = Matrix(0, d.dim());
  const std::size_t n = d.dim();
  const double* base = d.features.row(0);
  for (PendingBall& pb : done) {
    GranularBall b;
    b.size = pb.size();
    b.center.assign(n, 0.0);
    simd::accumulate_rows(base, pb.members.data(), pb.members.size(), n, b.center.data());
    const double inv = 1.0 / static_cast<double>(b.size);
    for (double& v : b.center) v *= inv;
    b.radius =
        simd::sum_center_distances(base, pb.members.data(), pb.members.size(), n, b.center.data()) *
        inv;
    b.label = pb.majority_label();
    b.purity = pb.ball_purity();
    b.member_indices = std::move(pb.members);
    if (b.label > 0) {
      bs.C.append_row(b.center);
      bs.r_plus.push_back(b.radius);
    } else {
      bs.D.append_row(b.center);
      bs.r_minus.push_back(b.radius);
    }
    bs.balls.push_back(std::move(b));
  }
  return bs;
}

BallSet singleton_balls(const Dataset& d) {
  d.validate();
  BallSet bs;
  bs.balls.reserve(d.size());
  bs.C = Matrix(0, d.dim());
  bs.D = Matrix(0, d.dim());
  for (std::size_t i = 0; i < d.size(); ++i) {
    GranularBall b;
    b.center.assign(d.features.row(i), d.features.row(i) + d.dim());
    b.radius = 0.0;
    b.label = d.labels[i];
    b.size = 1;
    b.purity = 1.0;
    b.member_indices = {i};
    if (b.label > 0) {
      bs.C.append_row(b.center);
      bs.r_plus.push_back(0.0);
    } else {
      bs.D.append_row(b.center);
      bs.r_minus.push_back(0.0);
    }
    bs.balls.push_back(std::move(b));
  }
  return bs;
}

void save_ballset_csv(const BallSet& bs, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_ballset_csv: cannot open " + path);
  const std::size_t n = bs.balls.empty() ? 0 : bs.balls.front().center.size();
  for (std::size_t c = 0; c < n; ++c) out << "c" << c << ",";
  out << "radius,label,size\n";
  char tmp[32];
  for (const auto& b : bs.balls) {
    for (double v : b.center) {
      std::snprintf(tmp, sizeof(tmp), "%.17g", v);
      out << tmp << ",";
    }
    std::snprintf(tmp, sizeof(tmp), "%.17g", b.radius);
    out << tmp << "," << b.label << "," << b.size << "\n";
  }
  if (!out) throw std::runtime_error("save_ballset_csv: write failure on " + path);
}

}  // namespace gblstsvm
