#include "gblstsvm/models.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "gblstsvm/simd.hpp"

namespace gblstsvm {

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::lstsvm:
      return "lstsvm";
    case Variant::gblstsvm:
      return "gblstsvm";
    case Variant::lsgblstsvm:
      return "lsgblstsvm";
  }
  return "unknown";
}

Variant variant_from_name(const std::string& name) {
  if (name == "lstsvm") return Variant::lstsvm;
  if (name == "gblstsvm") return Variant::gblstsvm;
  if (name == "lsgblstsvm") return Variant::lsgblstsvm;
  throw std::invalid_argument("unknown variant '" + name + "'");
}

namespace {

void check_costs(double c1, double c2) {
  if (!(c1 > 0.0 && c2 > 0.0)) throw std::invalid_argument("fit: c parameters must be positive");
}

/// Shared closed-form twin solve. `a` holds the +1-side rows, `b` the
/// -1-side rows (raw points, ball centers, or kernel-expanded centers);
/// w_pos/w_neg are the per-row constraint offsets (1 + radius).
PlanePair twin_closed_form(const Matrix& a, const Matrix& b, const Vector& w_pos,
                           const Vector& w_neg, double c1, double c2, double ridge) {
  const Matrix ee = linalg::ata_augmented(a);  // E'E with E = [a 1]
  const Matrix ff = linalg::ata_augmented(b);  // F'F with F = [b 1]
  const std::size_t n = ee.rows();

  Matrix m1(n, n), m2(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      m1(i, j) = ff(i, j) + ee(i, j) / c1;
      m2(i, j) = ee(i, j) + ff(i, j) / c2;
    }

  const Vector rhs1 = linalg::weighted_colsum_augmented(b, w_neg);
  const Vector rhs2 = linalg::weighted_colsum_augmented(a, w_pos);

  Vector z1 = solve_spd(m1, rhs1, ridge);
  Vector z2 = solve_spd(m2, rhs2, ridge);

  PlanePair p;
  p.w1.assign(z1.begin(), z1.end() - 1);
  p.b1 = -z1.back();
  for (double& v : p.w1) v = -v;
  p.w2.assign(z2.begin(), z2.end() - 1);
  p.b2 = z2.back();
  return p;
}

Vector ones_plus(const Vector& radii) {
  Vector w(radii.size());
  for (std::size_t i = 0; i < radii.size(); ++i) w[i] = 1.0 + radii[i];
  return w;
}

void check_ballset(const BallSet& bs) {
  if (bs.count_positive() == 0 || bs.count_negative() == 0)
    throw std::invalid_argument("fit: each class needs at least one ball");
}

Matrix stack_anchors(const BallSet& bs) {
  Matrix o(0, bs.C.cols());
  for (std::size_t i = 0; i < bs.C.rows(); ++i) o.append_row(bs.C.row_span(i));
  for (std::size_t i = 0; i < bs.D.rows(); ++i) o.append_row(bs.D.row_span(i));
  return o;
}

/// Solves one regularized dual: min 1/2 (x;y)' Q (x;y) + lin_y' y with
/// Q = [[Gxx + reg_x I, Gxy], [Gxy', Gyy + reg_y I]] + ones.
struct LsDualResult {
  Vector x;
  Vector y;
  bool converged = true;
};

LsDualResult solve_ls_dual(const Matrix& gxx, const Matrix& gxy, const Matrix& gyy, double reg_x,
                           double reg_y, const Vector& lin_y, const SolverConfig& cfg) {
  const std::size_t nx = gxx.rows(), ny = gyy.rows(), n = nx + ny;
  QpProblem qp;
  qp.q = Matrix(n, n);
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0; j < nx; ++j) qp.q(i, j) = gxx(i, j) + 1.0;
    for (std::size_t j = 0; j < ny; ++j) qp.q(i, nx + j) = gxy(i, j) + 1.0;
    qp.q(i, i) += reg_x;
  }
  for (std::size_t i = 0; i < ny; ++i) {
    for (std::size_t j = 0; j < nx; ++j) qp.q(nx + i, j) = gxy(j, i) + 1.0;
    for (std::size_t j = 0; j < ny; ++j) qp.q(nx + i, nx + j) = gyy(i, j) + 1.0;
    qp.q(nx + i, nx + i) += reg_y;
  }
  qp.b.assign(n, 0.0);
  for (std::size_t i = 0; i < ny; ++i) qp.b[nx + i] = lin_y[i];

  QpResult r = qp_coordinate_ascent(qp, cfg);
  LsDualResult out;
  out.x.assign(r.z.begin(), r.z.begin() + static_cast<std::ptrdiff_t>(nx));
  out.y.assign(r.z.begin() + static_cast<std::ptrdiff_t>(nx), r.z.end());
  out.converged = r.converged;
  return out;
}

Vector scaled(const Vector& v, double s) {
  Vector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = s * v[i];
  return out;
}

}  // namespace

void KernelPlanePair::refresh_cache() {
  gram_anchors = gram(anchors, anchors, spec);
  const Vector ku1 = linalg::matvec(gram_anchors, u1);
  const Vector ku2 = linalg::matvec(gram_anchors, u2);
  norm1 = std::sqrt(std::max(0.0, simd::dot(u1.data(), ku1.data(), u1.size())));
  norm2 = std::sqrt(std::max(0.0, simd::dot(u2.data(), ku2.data(), u2.size())));
}

PlanePair fit_lstsvm(const Matrix& a, const Matrix& b, double c1, double c2, double ridge) {
  check_costs(c1, c2);
  if (a.rows() == 0 || b.rows() == 0)
    throw std::invalid_argument("fit_lstsvm: each class needs at least one sample");
  if (a.cols() != b.cols()) throw std::invalid_argument("fit_lstsvm: dimension mismatch");
  return twin_closed_form(a, b, Vector(a.rows(), 1.0), Vector(b.rows(), 1.0), c1, c2, ridge);
}

PlanePair fit_gblstsvm_linear(const BallSet& bs, double c1, double c2, double ridge) {
  check_costs(c1, c2);
  check_ballset(bs);
  return twin_closed_form(bs.C, bs.D, ones_plus(bs.r_plus), ones_plus(bs.r_minus), c1, c2, ridge);
}

KernelPlanePair fit_gblstsvm_kernel(const BallSet& bs, double c1, double c2,
                                    const KernelSpec& spec, double ridge) {
  check_costs(c1, c2);
  check_ballset(bs);
  spec.validate();

  KernelPlanePair p;
  p.anchors = stack_anchors(bs);
  p.spec = spec;
  const Matrix kc = gram(bs.C, p.anchors, spec);  // k1 x k
  const Matrix kd = gram(bs.D, p.anchors, spec);  // k2 x k
  PlanePair raw =
      twin_closed_form(kc, kd, ones_plus(bs.r_plus), ones_plus(bs.r_minus), c1, c2, ridge);
  p.u1 = std::move(raw.w1);
  p.b1 = raw.b1;
  p.u2 = std::move(raw.w2);
  p.b2 = raw.b2;
  p.refresh_cache();
  return p;
}

PlanePair fit_lsgblstsvm_linear(const BallSet& bs, double c1, double c2, double c3, double c4,
                                const SolverConfig& cfg, DualSolution* dual) {
  check_costs(c1, c2);
  check_costs(c3, c4);
  check_ballset(bs);
  const KernelSpec lin = KernelSpec::linear();
  const Matrix gcc = gram(bs.C, bs.C, lin);
  const Matrix gcd = gram(bs.C, bs.D, lin);
  const Matrix gdd = gram(bs.D, bs.D, lin);
  const std::size_t n = bs.C.cols();

  // plane 1: multipliers (alpha over C, beta over D)
  LsDualResult d1 =
      solve_ls_dual(gcc, gcd, gdd, c3, c3 / c1, scaled(ones_plus(bs.r_minus), c3), cfg);
  // plane 2: multipliers (lambda over D, theta over C)
  Matrix gdc(bs.D.rows(), bs.C.rows());
  for (std::size_t i = 0; i < gdc.rows(); ++i)
    for (std::size_t j = 0; j < gdc.cols(); ++j) gdc(i, j) = gcd(j, i);
  LsDualResult d2 =
      solve_ls_dual(gdd, gdc, gcc, c4, c4 / c2, scaled(ones_plus(bs.r_plus), c4), cfg);

  PlanePair p;
  p.w1.assign(n, 0.0);
  for (std::size_t i = 0; i < bs.C.rows(); ++i) simd::axpy(d1.x[i] / c3, bs.C.row(i), p.w1.data(), n);
  for (std::size_t i = 0; i < bs.D.rows(); ++i) simd::axpy(d1.y[i] / c3, bs.D.row(i), p.w1.data(), n);
  p.b1 = (simd::sum(d1.x.data(), d1.x.size()) + simd::sum(d1.y.data(), d1.y.size())) / c3;

  p.w2.assign(n, 0.0);
  for (std::size_t i = 0; i < bs.D.rows(); ++i) simd::axpy(-d2.x[i] / c4, bs.D.row(i), p.w2.data(), n);
  for (std::size_t i = 0; i < bs.C.rows(); ++i) simd::axpy(-d2.y[i] / c4, bs.C.row(i), p.w2.data(), n);
  p.b2 = -(simd::sum(d2.x.data(), d2.x.size()) + simd::sum(d2.y.data(), d2.y.size())) / c4;

  if (dual) {
    dual->alpha = std::move(d1.x);
    dual->beta = std::move(d1.y);
    dual->lambda = std::move(d2.x);
    dual->theta = std::move(d2.y);
    dual->plane1_converged = d1.converged;
    dual->plane2_converged = d2.converged;
  }
  return p;
}

KernelPlanePair fit_lsgblstsvm_kernel(const BallSet& bs, double c1, double c2, double c3,
                                      double c4, const KernelSpec& spec, const SolverConfig& cfg,
                                      DualSolution* dual) {
  check_costs(c1, c2);
  check_costs(c3, c4);
  check_ballset(bs);
  spec.validate();

  const Matrix gcc = gram(bs.C, bs.C, spec);
  const Matrix gcd = gram(bs.C, bs.D, spec);
  const Matrix gdd = gram(bs.D, bs.D, spec);
  const std::size_t k1 = bs.C.rows(), k2 = bs.D.rows();

  LsDualResult d1 =
      solve_ls_dual(gcc, gcd, gdd, c3, c3 / c1, scaled(ones_plus(bs.r_minus), c3), cfg);
  Matrix gdc(k2, k1);
  for (std::size_t i = 0; i < k2; ++i)
    for (std::size_t j = 0; j < k1; ++j) gdc(i, j) = gcd(j, i);
  LsDualResult d2 =
      solve_ls_dual(gdd, gdc, gcc, c4, c4 / c2, scaled(ones_plus(bs.r_plus), c4), cfg);

  KernelPlanePair p;
  p.anchors = stack_anchors(bs);
  p.spec = spec;
  // f1(x) = (alpha' K(C,x) + beta' K(D,x)) / c3 + b1; coefficients laid out
  // over the anchor stack [C; D]
  p.u1.resize(k1 + k2);
  for (std::size_t i = 0; i < k1; ++i) p.u1[i] = d1.x[i] / c3;
  for (std::size_t i = 0; i < k2; ++i) p.u1[k1 + i] = d1.y[i] / c3;
  p.b1 = (simd::sum(d1.x.data(), k1) + simd::sum(d1.y.data(), k2)) / c3;
  // f2(x) = -(lambda' K(D,x) + theta' K(C,x)) / c4 + b2
  p.u2.resize(k1 + k2);
  for (std::size_t i = 0; i < k1; ++i) p.u2[i] = -d2.y[i] / c4;
  for (std::size_t i = 0; i < k2; ++i) p.u2[k1 + i] = -d2.x[i] / c4;
  p.b2 = -(simd::sum(d2.x.data(), k2) + simd::sum(d2.y.data(), k1)) / c4;
  p.refresh_cache();

  if (dual) {
    dual->alpha = std::move(d1.x);
    dual->beta = std::move(d1.y);
    dual->lambda = std::move(d2.x);
    dual->theta = std::move(d2.y);
    dual->plane1_converged = d1.converged;
    dual->plane2_converged = d2.converged;
  }
  return p;
}

namespace {

int nearer_plane(double f1, double norm1, double b1, double f2, double norm2, double b2) {
  constexpr double kDegenerate = 1e-12;
  const double d1 = norm1 < kDegenerate ? std::fabs(b1) : std::fabs(f1) / norm1;
  const double d2 = norm2 < kDegenerate ? std::fabs(b2) : std::fabs(f2) / norm2;
  return d1 <= d2 ? 1 : -1;
}

}  // namespace

int classify(const PlanePair& p, std::span<const double> x) {
  if (x.size() != p.w1.size()) throw std::invalid_argument("classify: dimension mismatch");
  const double f1 = simd::dot(p.w1.data(), x.data(), x.size()) + p.b1;
  const double f2 = simd::dot(p.w2.data(), x.data(), x.size()) + p.b2;
  const double n1 = std::sqrt(simd::dot(p.w1.data(), p.w1.data(), p.w1.size()));
  const double n2 = std::sqrt(simd::dot(p.w2.data(), p.w2.data(), p.w2.size()));
  return nearer_plane(f1, n1, p.b1, f2, n2, p.b2);
}

int classify(const KernelPlanePair& p, std::span<const double> x) {
  if (x.size() != p.anchors.cols()) throw std::invalid_argument("classify: dimension mismatch");
  const std::size_t k = p.anchors.rows();
  Vector kx(k);
  for (std::size_t i = 0; i < k; ++i) kx[i] = kernel_value(p.anchors.row_span(i), x, p.spec);
  const double f1 = simd::dot(p.u1.data(), kx.data(), k) + p.b1;
  const double f2 = simd::dot(p.u2.data(), kx.data(), k) + p.b2;
  return nearer_plane(f1, p.norm1, p.b1, f2, p.norm2, p.b2);
}

int Model::predict(std::span<const double> x) const {
  if (norm_) {
    if (x.size() != norm_->min.size()) throw std::invalid_argument("predict: dimension mismatch");
    Vector scaled_x(x.size());
    for (std::size_t c = 0; c < x.size(); ++c) {
      const double range = norm_->max[c] - norm_->min[c];
      scaled_x[c] = range > 0.0 ? (x[c] - norm_->min[c]) / range : 0.0;
    }
    return is_kernel() ? classify(kernel_plane_pair(), scaled_x) : classify(plane_pair(), scaled_x);
  }
  return is_kernel() ? classify(kernel_plane_pair(), x) : classify(plane_pair(), x);
}

std::vector<int> Model::predict(const Matrix& rows) const {
  std::vector<int> out(rows.rows());
  for (std::size_t i = 0; i < rows.rows(); ++i) out[i] = predict(rows.row_span(i));
  return out;
}

namespace {

void write_vector(std::ostream& out, const char* key, const Vector& v) {
  out << key << " " << v.size();
  char tmp[32];
  for (double x : v) {
    std::snprintf(tmp, sizeof(tmp), " %.17g", x);
    out << tmp;
  }
  out << "\n";
}

Vector read_vector(std::istream& in, const std::string& expect) {
  std::string key;
  std::size_t n;
  if (!(in >> key >> n) || key != expect)
    throw std::runtime_error("model load: expected field '" + expect + "'");
  Vector v(n);
  for (double& x : v)
    if (!(in >> x)) throw std::runtime_error("model load: truncated field '" + expect + "'");
  return v;
}

}  // namespace

void Model::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("model save: cannot open " + path);
  out << "gblstsvm-model 1\n";
  out << "variant " << variant_name(variant_) << "\n";
  out << "balls " << train_balls_ << "\n";
  out << "converged " << (converged_ ? 1 : 0) << "\n";
  if (norm_) {
    write_vector(out, "norm_min", norm_->min);
    write_vector(out, "norm_max", norm_->max);
  }
  char tmp[32];
  if (is_kernel()) {
    const auto& p = kernel_plane_pair();
    out << "form kernel\n";
    out << "kernel " << (p.spec.kind == KernelKind::gaussian ? "gaussian" : "linear") << "\n";
    std::snprintf(tmp, sizeof(tmp), "%.17g", p.spec.sigma);
    out << "sigma " << tmp << "\n";
    std::snprintf(tmp, sizeof(tmp), "%.17g", p.b1);
    out << "b1 " << tmp << "\n";
    std::snprintf(tmp, sizeof(tmp), "%.17g", p.b2);
    out << "b2 " << tmp << "\n";
    write_vector(out, "u1", p.u1);
    write_vector(out, "u2", p.u2);
    out << "anchors " << p.anchors.rows() << " " << p.anchors.cols() << "\n";
    for (std::size_t i = 0; i < p.anchors.rows(); ++i) {
      for (std::size_t j = 0; j < p.anchors.cols(); ++j) {
        std::snprintf(tmp, sizeof(tmp), "%.17g", p.anchors(i, j));
        out << (j ? " " : "") << tmp;
      }
      out << "\n";
    }
  } else {
    const auto& p = plane_pair();
    out << "form plane\n";
    std::snprintf(tmp, sizeof(tmp), "%.17g", p.b1);
    out << "b1 " << tmp << "\n";
    std::snprintf(tmp, sizeof(tmp), "%.17g", p.b2);
    out << "b2 " << tmp << "\n";
    write_vector(out, "w1", p.w1);
    write_vector(out, "w2", p.w2);
  }
  if (!out) throw std::runtime_error("model save: write failure on " + path);
}

Model Model::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("model load: cannot open " + path);
  std::string magic;
  int version;
  if (!(in >> magic >> version) || magic != "gblstsvm-model" || version != 1)
    throw std::runtime_error("model load: " + path + " is not a model file");

  auto read_kv = [&](const std::string& expect) {
    std::string key, value;
    if (!(in >> key >> value) || key != expect)
      throw std::runtime_error("model load: expected field '" + expect + "'");
    return value;
  };

  Model m;
  m.variant_ = variant_from_name(read_kv("variant"));
  m.train_balls_ = std::stoull(read_kv("balls"));
  m.converged_ = read_kv("converged") == "1";
  std::string next;
  if (!(in >> next)) throw std::runtime_error("model load: truncated file");
  if (next == "norm_min") {
    auto read_rest = [&] {
      std::size_t n;
      if (!(in >> n)) throw std::runtime_error("model load: truncated normalization");
      Vector v(n);
      for (double& x : v)
        if (!(in >> x)) throw std::runtime_error("model load: truncated normalization");
      return v;
    };
    NormParams np;
    np.min = read_rest();
    np.max = read_vector(in, "norm_max");
    m.norm_ = std::move(np);
    if (!(in >> next)) throw std::runtime_error("model load: truncated file");
  }
  if (next != "form") throw std::runtime_error("model load: expected field 'form'");
  std::string form;
  if (!(in >> form)) throw std::runtime_error("model load: truncated file");
  if (form == "kernel") {
    KernelPlanePair p;
    const std::string kind = read_kv("kernel");
    p.spec.kind = kind == "gaussian" ? KernelKind::gaussian : KernelKind::linear;
    p.spec.sigma = std::stod(read_kv("sigma"));
    p.b1 = std::stod(read_kv("b1"));
    p.b2 = std::stod(read_kv("b2"));
    p.u1 = read_vector(in, "u1");
    p.u2 = read_vector(in, "u2");
    std::string key;
    std::size_t rows, cols;
    if (!(in >> key >> rows >> cols) || key != "anchors")
      throw std::runtime_error("model load: expected anchors");
    p.anchors = Matrix(rows, cols);
    for (double& v : p.anchors.data())
      if (!(in >> v)) throw std::runtime_error("model load: truncated anchors");
    if (p.u1.size() != rows || p.u2.size() != rows)
      throw std::runtime_error("model load: coefficient/anchor size mismatch");
    p.refresh_cache();
    m.planes_ = std::move(p);
  } else if (form == "plane") {
    PlanePair p;
    p.b1 = std::stod(read_kv("b1"));
    p.b2 = std::stod(read_kv("b2"));
    p.w1 = read_vector(in, "w1");
    p.w2 = read_vector(in, "w2");
    m.planes_ = std::move(p);
  } else {
    throw std::runtime_error("model load: unknown form '" + form + "'");
  }
  return m;
}

Model train_pipeline(const Dataset& d, const HyperParams& hp, Variant variant,
                     const KernelSpec& spec, std::uint64_t seed, const SolverConfig& cfg) {
  d.validate();
  hp.validate();
  spec.validate();
  const bool has_pos = std::any_of(d.labels.begin(), d.labels.end(), [](int y) { return y > 0; });
  const bool has_neg = std::any_of(d.labels.begin(), d.labels.end(), [](int y) { return y < 0; });
  if (!has_pos || !has_neg)
    throw std::invalid_argument("train_pipeline: both classes must be present");

  const bool kernel = spec.kind == KernelKind::gaussian;

  if (variant == Variant::lstsvm) {
    const BallSet bs = singleton_balls(d);
    if (kernel) {
      Model m(variant, fit_gblstsvm_kernel(bs, hp.c1, hp.c2, spec, cfg.ridge), bs.count());
      return m;
    }
    return Model(variant, fit_lstsvm(bs.C, bs.D, hp.c1, hp.c2, cfg.ridge), bs.count());
  }

  const BallSet bs = generate_balls(d, hp.pur, hp.num, seed);
  if (variant == Variant::gblstsvm) {
    if (kernel)
      return Model(variant, fit_gblstsvm_kernel(bs, hp.c1, hp.c2, spec, cfg.ridge), bs.count());
    return Model(variant, fit_gblstsvm_linear(bs, hp.c1, hp.c2, cfg.ridge), bs.count());
  }

  DualSolution dual;
  Model m = kernel
                ? Model(variant,
                        fit_lsgblstsvm_kernel(bs, hp.c1, hp.c2, hp.c3, hp.c4, spec, cfg, &dual),
                        bs.count())
                : Model(variant, fit_lsgblstsvm_linear(bs, hp.c1, hp.c2, hp.c3, hp.c4, cfg, &dual),
                        bs.count());
  m.set_converged(dual.plane1_converged && dual.plane2_converged);
  return m;
}

}  // namespace gblstsvm
