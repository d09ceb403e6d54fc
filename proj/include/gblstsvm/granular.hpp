#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gblstsvm/dataset.hpp"
#include "gblstsvm/linalg.hpp"

namespace gblstsvm {

/// A cluster summary standing in for its member points: center of gravity,
/// mean distance to center, majority label.
struct GranularBall {
  Vector center;
  double radius = 0.0;
  int label = 1;
  std::size_t size = 0;
  double purity = 1.0;
  std::vector<std::size_t> member_indices;  // rows of the source dataset
};

/// Class-partitioned view of a ball covering: centers of +1 balls stacked in
/// C, -1 balls in D, with matching radius vectors.
struct BallSet {
  std::vector<GranularBall> balls;
  Matrix C;        // k1 x N
  Matrix D;        // k2 x N
  Vector r_plus;   // k1 radii
  Vector r_minus;  // k2 radii

  std::size_t count() const { return balls.size(); }
  std::size_t count_positive() const { return C.rows(); }
  std::size_t count_negative() const { return D.rows(); }
};

/// Fraction of members carrying the majority label; in [0.5, 1].
double purity(std::span<const int> labels);

/// Center = mean point, radius = mean Euclidean distance to the center,
/// label = majority (ties resolve to +1).
GranularBall ball_from_members(const Matrix& points, std::span<const std::size_t> rows,
                               std::span<const int> labels);

/// Convenience overload over whole-matrix members.
GranularBall ball_from_members(const Matrix& points, std::span<const int> labels);

/// 2-means split. Initial centroids are the two mutually farthest members
/// under seeded candidate-pair sampling; Lloyd iterations run to a stable
/// assignment; an empty cluster is repaired by moving the point farthest
/// from the other centroid into it. Returns two non-empty index sets
/// (indices into `rows`).
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_two_means(
    const Matrix& points, std::span<const std::size_t> rows, std::uint64_t seed);

/// Algorithm: start from one ball holding the whole dataset; split any ball
/// with purity < pur and size >= 2; once all balls are pure or singleton,
/// split largest balls until at least `num` exist (capped by m); finally
/// guarantee each present class owns at least one ball.
BallSet generate_balls(const Dataset& d, double pur, std::size_t num, std::uint64_t seed);

/// BallSet built directly from points, one singleton ball per sample.
BallSet singleton_balls(const Dataset& d);

/// One row per ball: center..., radius, label, size.
void save_ballset_csv(const BallSet& bs, const std::string& path);

}  // namespace gblstsvm
