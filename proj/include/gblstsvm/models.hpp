#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "gblstsvm/dataset.hpp"
#include "gblstsvm/granular.hpp"
#include "gblstsvm/hyperparams.hpp"
#include "gblstsvm/kernel.hpp"
#include "gblstsvm/solver.hpp"

namespace gblstsvm {

enum class Variant { lstsvm, gblstsvm, lsgblstsvm };

std::string variant_name(Variant v);
Variant variant_from_name(const std::string& name);

/// The two non-parallel hyperplanes f_i(x) = w_i.x + b_i of a linear fit.
struct PlanePair {
  Vector w1;
  double b1 = 0.0;
  Vector w2;
  double b2 = 0.0;
};

/// Kernel-expansion planes f_i(x) = u_i . K(anchors, x) + b_i over the
/// fixed anchor set of all ball centers (C stacked over D).
struct KernelPlanePair {
  Vector u1;
  double b1 = 0.0;
  Vector u2;
  double b2 = 0.0;
  Matrix anchors;       // k x N
  KernelSpec spec;
  Matrix gram_anchors;  // K(anchors, anchors), cached for norm computation
  double norm1 = 0.0;   // sqrt(u1' K u1)
  double norm2 = 0.0;

  /// Recomputes gram_anchors and the plane norms from u/anchors/spec.
  void refresh_cache();
};

/// Multipliers of the regularized duals; eliminated slack variables have no
/// runtime representation.
struct DualSolution {
  Vector alpha;
  Vector beta;
  Vector lambda;
  Vector theta;
  bool plane1_converged = true;
  bool plane2_converged = true;
};

PlanePair fit_lstsvm(const Matrix& a, const Matrix& b, double c1, double c2,
                     double ridge = 1e-8);

PlanePair fit_gblstsvm_linear(const BallSet& bs, double c1, double c2, double ridge = 1e-8);

KernelPlanePair fit_gblstsvm_kernel(const BallSet& bs, double c1, double c2,
                                    const KernelSpec& spec, double ridge = 1e-8);

PlanePair fit_lsgblstsvm_linear(const BallSet& bs, double c1, double c2, double c3, double c4,
                                const SolverConfig& cfg = {}, DualSolution* dual = nullptr);

KernelPlanePair fit_lsgblstsvm_kernel(const BallSet& bs, double c1, double c2, double c3,
                                      double c4, const KernelSpec& spec,
                                      const SolverConfig& cfg = {}, DualSolution* dual = nullptr);

/// Nearer-plane rule: +1 iff |f_1(x)|/|w_1| <= |f_2(x)|/|w_2|; a plane with
/// |w| < 1e-12 uses |b| as its distance.
int classify(const PlanePair& p, std::span<const double> x);
int classify(const KernelPlanePair& p, std::span<const double> x);

/// A fitted predictor: plane parameters plus enough context to classify and
/// to serialize/reload.
class Model {
 public:
  Model() = default;
  Model(Variant v, PlanePair planes, std::size_t train_balls)
      : variant_(v), planes_(std::move(planes)), train_balls_(train_balls) {}
  Model(Variant v, KernelPlanePair planes, std::size_t train_balls)
      : variant_(v), planes_(std::move(planes)), train_balls_(train_balls) {}

  Variant variant() const { return variant_; }
  bool is_kernel() const { return std::holds_alternative<KernelPlanePair>(planes_); }
  std::size_t train_ball_count() const { return train_balls_; }
  bool converged() const { return converged_; }
  void set_converged(bool c) { converged_ = c; }

  /// Feature scaling fitted on the training data; when set, predict()
  /// applies it to incoming rows.
  const std::optional<NormParams>& normalization() const { return norm_; }
  void set_normalization(NormParams p) { norm_ = std::move(p); }

  const PlanePair& plane_pair() const { return std::get<PlanePair>(planes_); }
  const KernelPlanePair& kernel_plane_pair() const { return std::get<KernelPlanePair>(planes_); }

  int predict(std::span<const double> x) const;
  std::vector<int> predict(const Matrix& rows) const;

  void save(const std::string& path) const;
  static Model load(const std::string& path);

 private:
  Variant variant_ = Variant::lstsvm;
  std::variant<PlanePair, KernelPlanePair> planes_;
  std::size_t train_balls_ = 0;
  bool converged_ = true;
  std::optional<NormParams> norm_;
};

/// Granulates (ball variants), dispatches to the matching fit, and returns
/// the fitted predictor. LSTSVM with a Gaussian kernel is trained as the
/// singleton-ball kernel machine (anchors = all training points, radii 0).
Model train_pipeline(const Dataset& d, const HyperParams& hp, Variant variant,
                     const KernelSpec& spec, std::uint64_t seed,
                     const SolverConfig& cfg = {});

}  // namespace gblstsvm
