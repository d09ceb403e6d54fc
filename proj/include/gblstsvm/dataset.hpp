#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gblstsvm/linalg.hpp"

namespace gblstsvm {

/// Labeled binary-classification dataset. Labels are canonicalized to
/// {-1, +1} at load time; feature rows are immutable after construction.
struct Dataset {
  Matrix features;              // m x N, row per sample
  std::vector<int> labels;      // m entries, each -1 or +1
  std::vector<std::string> names;  // optional feature names (empty if none)

  std::size_t size() const { return labels.size(); }
  std::size_t dim() const { return features.cols(); }

  /// Throws std::invalid_argument when the invariants do not hold.
  void validate() const;
};

struct NormParams {
  Vector min;  // per-feature minimum
  Vector max;  // per-feature maximum
};

struct CsvOptions {
  /// Label column index; unset means the last column.
  std::optional<std::size_t> label_column;
  /// Explicit raw-token -> {-1,+1} mapping. When empty, numeric labels are
  /// auto-mapped: {-1,+1} kept, {0,1} -> 0:-1 1:+1, {1,2} -> 1:-1 2:+1.
  std::map<std::string, int> label_map;
};

Dataset load_csv(const std::string& path, const CsvOptions& opts = {});
void save_csv(const Dataset& d, const std::string& path);

/// Affinely maps every feature column into [0,1]; constant columns map to 0.
std::pair<Dataset, NormParams> minmax_normalize(const Dataset& d);

/// Applies previously computed parameters (for test data).
Dataset apply_normalization(const Dataset& d, const NormParams& p);

/// Inverse of minmax_normalize for non-constant columns.
Dataset denormalize(const Dataset& d, const NormParams& p);

/// Disjoint random partition with |train| = round(train_fraction * m).
std::pair<Dataset, Dataset> train_test_split(const Dataset& d, double train_fraction,
                                             std::uint64_t seed);

/// Flips exactly floor(rate * m) labels at distinct random indices.
Dataset inject_label_noise(const Dataset& d, double rate, std::uint64_t seed);

/// 2-D points on two crossing lines through the origin (class +1 on the
/// first, -1 on the second) plus Gaussian jitter.
Dataset gen_crossplane(std::size_t n, double jitter, std::uint64_t seed);

/// Normally distributed clusters; each cluster's label is the side of a
/// random hyperplane its mean lies on. `separation` is the signed margin
/// between cluster means and the hyperplane in within-cluster sigmas.
Dataset gen_ndc(std::size_t n, std::size_t dim, double separation, std::uint64_t seed);

}  // namespace gblstsvm
