#include "gblstsvm/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "gblstsvm/rng.hpp"
#include "gblstsvm/simd.hpp"

namespace gblstsvm {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    // trim surrounding whitespace
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

void write_double(std::string& buf, double v) {
  char tmp[32];
  std::snprintf(tmp, sizeof(tmp), "%.17g", v);
  buf += tmp;
}

}  // namespace

void Dataset::validate() const {
  if (labels.empty() || features.cols() == 0)
    throw std::invalid_argument("dataset: need at least one sample and one feature");
  if (features.rows() != labels.size())
    throw std::invalid_argument("dataset: label count does not match row count");
  for (int y : labels)
    if (y != -1 && y != 1) throw std::invalid_argument("dataset: labels must be -1 or +1");
  for (double v : features.data())
    if (!std::isfinite(v)) throw std::invalid_argument("dataset: non-finite feature value");
}

Dataset load_csv(const std::string& path, const CsvOptions& opts) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_csv: cannot open " + path);

  std::vector<std::vector<std::string>> raw;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    raw.push_back(split_line(line));
  }
  if (in.bad()) throw std::runtime_error("load_csv: I/O failure reading " + path);
  if (raw.empty()) throw std::runtime_error("load_csv: " + path + " is empty");

  const std::size_t ncols = raw.front().size();
  for (const auto& r : raw)
    if (r.size() != ncols) throw std::runtime_error("load_csv: ragged rows in " + path);
  if (ncols < 2) throw std::runtime_error("load_csv: need at least one feature and a label column");

  // Header auto-detection: a first row where no cell parses as a number is a
  // header; a mixed row is data (and malformed cells error below).
  std::vector<std::string> header;
  std::size_t first_data = 0;
  {
    double tmp;
    bool any_numeric = false;
    for (const auto& cell : raw.front())
      if (parse_double(cell, tmp)) {
        any_numeric = true;
        break;
      }
    if (!any_numeric) {
      header = raw.front();
      first_data = 1;
      if (raw.size() == 1) throw std::runtime_error("load_csv: header but no data rows");
    }
  }

  const std::size_t label_col = opts.label_column.value_or(ncols - 1);
  if (label_col >= ncols) throw std::runtime_error("load_csv: label column out of range");

  Dataset d;
  d.features = Matrix(raw.size() - first_data, ncols - 1);
  d.labels.resize(raw.size() - first_data);
  std::vector<std::string> raw_labels(raw.size() - first_data);

  for (std::size_t r = first_data; r < raw.size(); ++r) {
    const std::size_t i = r - first_data;
    std::size_t c_out = 0;
    for (std::size_t c = 0; c < ncols; ++c) {
      if (c == label_col) {
        raw_labels[i] = raw[r][c];
        continue;
      }
      double v;
      if (!parse_double(raw[r][c], v))
        throw std::runtime_error("load_csv: non-numeric feature '" + raw[r][c] + "' at row " +
                                 std::to_string(r + 1));
      d.features(i, c_out++) = v;
    }
  }

  if (!opts.label_map.empty()) {
    for (std::size_t i = 0; i < raw_labels.size(); ++i) {
      const auto it = opts.label_map.find(raw_labels[i]);
      if (it == opts.label_map.end())
        throw std::runtime_error("load_csv: label '" + raw_labels[i] + "' missing from label map");
      if (it->second != -1 && it->second != 1)
        throw std::runtime_error("load_csv: label map values must be -1 or +1");
      d.labels[i] = it->second;
    }
  } else {
    std::set<double> distinct;
    std::vector<double> numeric(raw_labels.size());
    for (std::size_t i = 0; i < raw_labels.size(); ++i) {
      if (!parse_double(raw_labels[i], numeric[i]))
        throw std::runtime_error("load_csv: unmappable label value '" + raw_labels[i] + "'");
      distinct.insert(numeric[i]);
    }
    auto contained_in = [&](std::initializer_list<double> allowed) {
      return std::all_of(distinct.begin(), distinct.end(), [&](double v) {
        return std::find(allowed.begin(), allowed.end(), v) != allowed.end();
      });
    };
    double pos;
    if (contained_in({-1.0, 1.0})) {
      pos = 1.0;  // already canonical
    } else if (contained_in({0.0, 1.0})) {
      pos = 1.0;  // 0 -> -1
    } else if (contained_in({1.0, 2.0})) {
      pos = 2.0;  // 1 -> -1
    } else {
      throw std::runtime_error("load_csv: label values not mappable to {-1,+1}");
    }
    for (std::size_t i = 0; i < numeric.size(); ++i) d.labels[i] = numeric[i] == pos ? 1 : -1;
  }

  if (!header.empty()) {
    for (std::size_t c = 0; c < ncols; ++c)
      if (c != label_col) d.names.push_back(header[c]);
  }
  d.validate();
  return d;
}

void save_csv(const Dataset& d, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_csv: cannot open " + path);
  std::string buf;
  if (!d.names.empty()) {
    for (const auto& n : d.names) buf += n + ",";
    buf += "label\n";
  } else {
    for (std::size_t c = 0; c < d.dim(); ++c) buf += "f" + std::to_string(c) + ",";
    buf += "label\n";
  }
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (std::size_t c = 0; c < d.dim(); ++c) {
      write_double(buf, d.features(i, c));
      buf += ',';
    }
    buf += d.labels[i] > 0 ? "1" : "-1";
    buf += '\n';
  }
  out << buf;
  if (!out) throw std::runtime_error("save_csv: write failure on " + path);
}

std::pair<Dataset, NormParams> minmax_normalize(const Dataset& d) {
  d.validate();
  NormParams p;
  const std::size_t n = d.dim();
  p.min.assign(n, std::numeric_limits<double>::infinity());
  p.max.assign(n, -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < d.size(); ++i)
    for (std::size_t c = 0; c < n; ++c) {
      p.min[c] = std::min(p.min[c], d.features(i, c));
      p.max[c] = std::max(p.max[c], d.features(i, c));
    }
  return {apply_normalization(d, p), p};
}

Dataset apply_normalization(const Dataset& d, const NormParams& p) {
  if (p.min.size() != d.dim()) throw std::invalid_argument("apply_normalization: dimension mismatch");
  Dataset out = d;
  for (std::size_t c = 0; c < d.dim(); ++c) {
    const double range = p.max[c] - p.min[c];
    for (std::size_t i = 0; i < d.size(); ++i) {
      out.features(i, c) = range > 0.0 ? (d.features(i, c) - p.min[c]) / range : 0.0;
    }
  }
  return out;
}

Dataset denormalize(const Dataset& d, const NormParams& p) {
  if (p.min.size() != d.dim()) throw std::invalid_argument("denormalize: dimension mismatch");
  Dataset out = d;
  for (std::size_t c = 0; c < d.dim(); ++c) {
    const double range = p.max[c] - p.min[c];
    for (std::size_t i = 0; i < d.size(); ++i) {
      out.features(i, c) = range > 0.0 ? d.features(i, c) * range + p.min[c] : p.min[c];
    }
  }
  return out;
}

namespace {

Dataset take_rows(const Dataset& d, const std::vector<std::size_t>& idx) {
  Dataset out;
  out.names = d.names;
  out.features = Matrix(idx.size(), d.dim());
  out.labels.resize(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    std::copy_n(d.features.row(idx[i]), d.dim(), out.features.row(i));
    out.labels[i] = d.labels[idx[i]];
  }
  return out;
}

}  // namespace

std::pair<Dataset, Dataset> train_test_split(const Dataset& d, double train_fraction,
                                             std::uint64_t seed) {
  d.validate();
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw std::invalid_argument("train_test_split: fraction must be in (0,1)");
  const std::size_t m = d.size();
  if (m < 2) throw std::invalid_argument("train_test_split: need at least two samples");
  const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * (double)m));
  if (n_train == 0 || n_train == m)
    throw std::invalid_argument("train_test_split: partition would leave one side empty");

  std::vector<std::size_t> idx(m);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(seed);
  shuffle(idx.begin(), idx.end(), rng);
  std::vector<std::size_t> tr(idx.begin(), idx.begin() + n_train);
  std::vector<std::size_t> te(idx.begin() + n_train, idx.end());
  // keep original row order inside each side
  std::sort(tr.begin(), tr.end());
  std::sort(te.begin(), te.end());
  return {take_rows(d, tr), take_rows(d, te)};
}

Dataset inject_label_noise(const Dataset& d, double rate, std::uint64_t seed) {
  d.validate();
  if (!(rate >= 0.0 && rate <= 0.5))
    throw std::invalid_argument("inject_label_noise: rate must be in [0, 0.5]");
  const auto n_flip = static_cast<std::size_t>(rate * (double)d.size());
  Dataset out = d;
  if (n_flip == 0) return out;
  std::vector<std::size_t> idx(d.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(seed);
  // partial Fisher-Yates: first n_flip entries are the flip set
  for (std::size_t i = 0; i < n_flip; ++i) {
    const std::size_t j = i + rng.uniform_index(d.size() - i);
    std::swap(idx[i], idx[j]);
  }
  for (std::size_t i = 0; i < n_flip; ++i) out.labels[idx[i]] = -out.labels[idx[i]];
  return out;
}

Dataset gen_crossplane(std::size_t n, double jitter, std::uint64_t seed) {
  if (n < 4) throw std::invalid_argument("gen_crossplane: need n >= 4");
  if (jitter < 0.0) throw std::invalid_argument("gen_crossplane: jitter must be >= 0");
  Rng rng(seed);
  Dataset d;
  d.features = Matrix(n, 2);
  d.labels.resize(n);
  // class +1 on y = x, class -1 on y = -x; alternating so classes stay
  // balanced for any n
  for (std::size_t i = 0; i < n; ++i) {
    const int label = (i % 2 == 0) ? 1 : -1;
    const double t = rng.uniform(-1.0, 1.0);
    const double slope = label > 0 ? 1.0 : -1.0;
    d.features(i, 0) = t + jitter * rng.normal();
    d.features(i, 1) = slope * t + jitter * rng.normal();
    d.labels[i] = label;
  }
  return d;
}

Dataset gen_ndc(std::size_t n, std::size_t dim, double separation, std::uint64_t seed) {
  if (n < 2 || dim < 1) throw std::invalid_argument("gen_ndc: need n >= 2 and dim >= 1");
  if (separation < 0.0) throw std::invalid_argument("gen_ndc: separation must be >= 0");
  constexpr std::size_t kClustersPerClass = 8;
  Rng rng(seed);

  // random unit hyperplane normal
  Vector w(dim);
  double norm = 0.0;
  for (auto& v : w) {
    v = rng.normal();
    norm += v * v;
  }
  norm = std::sqrt(norm);
  for (auto& v : w) v /= norm;

  // cluster means: fixed in-plane spread, signed margin separation/2 along
  // the normal so every mean sits on its class's side; the margin knob is
  // independent of the cluster layout
  const std::size_t n_clusters = 2 * kClustersPerClass;
  Matrix means(n_clusters, dim);
  std::vector<int> cluster_label(n_clusters);
  constexpr double kInPlaneSpread = 3.0;
  for (std::size_t c = 0; c < n_clusters; ++c) {
    const int label = c < kClustersPerClass ? 1 : -1;
    cluster_label[c] = label;
    Vector g(dim);
    for (auto& v : g) v = kInPlaneSpread * rng.normal();
    const double along = simd::dot(g.data(), w.data(), dim);
    const double target = label * (separation / 2.0 + std::fabs(rng.normal()));
    for (std::size_t j = 0; j < dim; ++j) means(c, j) = g[j] + (target - along) * w[j];
  }

  Dataset d;
  d.features = Matrix(n, dim);
  d.labels.resize(n);
  // round-robin assignment keeps class sizes within one sample of each other
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = i % n_clusters;
    for (std::size_t j = 0; j < dim; ++j) d.features(i, j) = means(c, j) + rng.normal();
    d.labels[i] = cluster_label[c];
  }
  return d;
}

}  // namespace gblstsvm
