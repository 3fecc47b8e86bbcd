#pragma once

#include "bregopt/convex_solver.hpp"
#include "bregopt/legendre.hpp"
#include "bregopt/step_model.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

namespace bregopt {

enum class ModelFamily { proximal_point, linear_mirror, prox_linear, saddle };
enum class Regime { A, B, C };

std::string_view to_string(ModelFamily family);
std::string_view to_string(Regime regime);
Regime regime_from_string(std::string_view name);

/// Constants an oracle claims; validated by the verify_* functions, never estimated.
struct ModelConstants {
  double tau = 0.0;
  double rho = 0.0;
  double mu = 0.0;
  double lip_bound = 0.0;  // 𝖫 ≥ √E[L(ξ)²]
  double smooth_M = 0.0;
  double variance_sigma = 0.0;
};

/// A draw ξ: an atom of the finite data distribution plus optional additive gradient noise.
struct Sample {
  std::size_t index = 0;
  Vector noise;
};

/// Stochastic one-sided model family over a finite weighted data set. The objective
/// f = Σ_i w_i f(·, ξ_i) is therefore available exactly.
class ModelOracle {
 public:
  virtual ~ModelOracle() = default;

  ModelFamily family() const { return family_; }
  Regime regime() const { return regime_; }
  const ModelConstants& constants() const { return constants_; }
  std::size_t dimension() const { return dimension_; }
  std::size_t support_size() const { return weights_.size(); }
  const std::vector<double>& weights() const { return weights_; }
  /// L(ξ_i) for each atom.
  const std::vector<double>& atom_lipschitz() const { return lipschitz_; }
  double lipschitz(const Sample& xi) const { return lipschitz_.at(xi.index); }
  /// √E[L(ξ)²] over the atoms.
  double lipschitz_rms() const;
  /// Standard deviation per coordinate of the additive gradient noise (0 if none).
  double noise_scale() const { return noise_scale_; }

  /// i.i.d. draw; bit-exact under a fixed generator state.
  Sample sample(Rng& rng) const;
  Sample atom(std::size_t index) const;

  /// y ↦ f_x(y, ξ).
  virtual StepModel step_model(const Vector& x, const Sample& xi) const = 0;
  double model_value(const Vector& x, const Vector& y, const Sample& xi) const;
  Vector model_subgradient(const Vector& x, const Vector& y, const Sample& xi) const;

  /// f(y, ξ_i).
  virtual double component_value(const Vector& y, std::size_t index) const = 0;
  virtual Vector component_subgradient(const Vector& y, std::size_t index) const = 0;
  virtual std::optional<Matrix> component_hessian(const Vector& y, std::size_t index) const;

  double f_value(const Vector& y) const;
  Vector f_subgradient(const Vector& y) const;
  std::optional<Matrix> f_hessian(const Vector& y) const;
  bool f_smooth() const { return smooth_; }
  ConvexObjective f_objective() const;

 protected:
  ModelOracle(ModelFamily family, Regime regime, ModelConstants constants, std::size_t dimension,
              std::vector<double> weights, std::vector<double> lipschitz, bool smooth,
              double noise_scale = 0.0);

 private:
  ModelFamily family_;
  Regime regime_;
  ModelConstants constants_;
  std::size_t dimension_;
  std::vector<double> weights_;
  std::vector<double> lipschitz_;
  bool smooth_;
  double noise_scale_;
};

using OraclePtr = std::shared_ptr<const ModelOracle>;

/// f(x) = E|⟨a_ξ, x⟩² − b_ξ| written as h(c(x,ξ)) with h = |·| and c(x,ξ) = ⟨a_ξ,x⟩² − b_ξ.
/// ∇c is Lipschitz with L2(ξ) = ‖a_ξ‖² against p ≡ 1 and bounded by L2(ξ)·√q(‖x‖) for q(u) = 4u².
struct CompositeData {
  Matrix rows;     // m × d, row i is a_i
  Vector targets;  // b_i
  std::vector<double> weights;

  std::size_t size() const { return static_cast<std::size_t>(rows.rows()); }
  double inner(const Vector& x, std::size_t i) const;
  Vector inner_gradient(const Vector& x, std::size_t i) const;
  double outer_lipschitz(std::size_t) const { return 1.0; }
  /// L2(ξ_i) for the Jacobian Lipschitz and growth bounds.
  double jacobian_constant(std::size_t i) const;
  static std::vector<double> accuracy_polynomial() { return {1.0}; }
  static std::vector<double> growth_polynomial() { return {0.0, 0.0, 4.0}; }
  /// τ = (4/3)E[L1 L2].
  double accuracy_tau() const;
};

/// Gauss–Newton models h(c(x,ξ) + ∇c(x,ξ)(y − x)).
class ProxLinearOracle final : public ModelOracle {
 public:
  ProxLinearOracle(CompositeData data, ModelConstants constants);
  const CompositeData& data() const { return data_; }

  StepModel step_model(const Vector& x, const Sample& xi) const override;
  double component_value(const Vector& y, std::size_t index) const override;
  Vector component_subgradient(const Vector& y, std::size_t index) const override;

 private:
  CompositeData data_;
};

enum class ComponentKind { linear, least_squares, quartic_residual };

/// Smooth finite-sum data: linear f_i(x) = ⟨a_i,x⟩, least squares ½(⟨a_i,x⟩ − b_i)² or
/// quartic f_i(x) = (⟨a_i,x⟩² − b_i)².
struct SmoothComponents {
  ComponentKind kind = ComponentKind::linear;
  Matrix rows;
  Vector targets;
  std::vector<double> weights;

  double value(const Vector& x, std::size_t i) const;
  Vector gradient(const Vector& x, std::size_t i) const;
  Matrix hessian(const Vector& x, std::size_t i) const;
};

enum class GradientMode {
  component,          // G(x, ξ) = ∇f(x, ξ)
  exact_plus_noise,   // G(x, ξ) = ∇f(x) + ε, ε ~ N(0, s² I)
};

/// Linear models f(x) + ⟨G(x,ξ), y − x⟩ (stochastic mirror descent).
class LinearMirrorOracle final : public ModelOracle {
 public:
  LinearMirrorOracle(SmoothComponents data, GradientMode mode, double noise_scale, Regime regime,
                     ModelConstants constants, std::vector<double> lipschitz);
  const SmoothComponents& data() const { return data_; }
  GradientMode mode() const { return mode_; }

  Vector stochastic_gradient(const Vector& x, const Sample& xi) const;
  StepModel step_model(const Vector& x, const Sample& xi) const override;
  double component_value(const Vector& y, std::size_t index) const override;
  Vector component_subgradient(const Vector& y, std::size_t index) const override;
  std::optional<Matrix> component_hessian(const Vector& y, std::size_t index) const override;

 private:
  SmoothComponents data_;
  GradientMode mode_;
};

/// Uncertainty set W for saddle problems.
struct UncertaintySet {
  enum class Kind { ball, finite } kind = Kind::ball;
  double radius = 0.0;
  std::vector<Vector> points;

  bool contains(const Vector& w, double tol = 1e-12) const;
};

/// g(x, w, ξ) = ⟨a_ξ + w, x⟩ with f(x) = E sup_{w∈W} g(x, w, ξ).
struct SaddleData {
  Matrix rows;
  std::vector<double> weights;
  UncertaintySet set;

  double g(const Vector& x, const Vector& w, std::size_t i) const;
  /// ŵ(x) ∈ argmax_{w∈W} g(x, w, ξ); radius·x/‖x‖ on a ball and 0 at x = 0.
  Vector argmax(const Vector& x, std::size_t i) const;
};

/// Models g(y, ŵ(x,ξ), ξ).
class SaddleOracle final : public ModelOracle {
 public:
  SaddleOracle(SaddleData data, ModelConstants constants, std::vector<double> lipschitz);
  const SaddleData& data() const { return data_; }

  StepModel step_model(const Vector& x, const Sample& xi) const override;
  double component_value(const Vector& y, std::size_t index) const override;
  Vector component_subgradient(const Vector& y, std::size_t index) const override;

 private:
  SaddleData data_;
};

/// Full models f_x(y, ξ) = f(y, ξ) (stochastic Bregman proximal point), built on
/// least-squares components f_i(y) = ½(⟨a_i, y⟩ − b_i)².
class ProximalPointOracle final : public ModelOracle {
 public:
  ProximalPointOracle(Matrix rows, Vector targets, std::vector<double> weights,
                      ModelConstants constants, std::vector<double> lipschitz);
  const Matrix& rows() const { return rows_; }
  const Vector& targets() const { return targets_; }

  StepModel step_model(const Vector& x, const Sample& xi) const override;
  double component_value(const Vector& y, std::size_t index) const override;
  Vector component_subgradient(const Vector& y, std::size_t index) const override;
  std::optional<Matrix> component_hessian(const Vector& y, std::size_t index) const override;

 private:
  Matrix rows_;
  Vector targets_;
};

// ---------------------------------------------------------------- verification

using PointSampler = std::function<Vector(Rng&)>;

struct OneSidedReport {
  double mean_gap_at_x = 0.0;   // E f_x(x,ξ) − f(x)
  double mean_overshoot = 0.0;  // E[f_x(y,ξ) − f(y)] − τ D_Φ(y,x)
  double bound_rhs = 0.0;       // τ D_Φ(y,x)
  double standard_error = 0.0;  // 0 for exact enumeration
  bool pass = false;
};

/// One-sided accuracy at a pair (x, y); τ is taken as 0 in regime C. Finite noise-free
/// supports are enumerated exactly, otherwise n_samples draws are used.
OneSidedReport verify_one_sided(const ModelOracle& oracle, const LegendreFunction& phi,
                                const Vector& x, const Vector& y, std::size_t n_samples, Rng& rng);

struct LipschitzReport {
  double max_ratio = 0.0;  // max (f_x(x,ξ) − f_x(y,ξ)) / (L(ξ)√D_Φ(y,x)); ≤ 1 when the claim holds
  double claimed_L = 0.0;
  double rms_L = 0.0;
  std::size_t pairs = 0;
  bool pass = false;
};

LipschitzReport verify_lipschitz(const ModelOracle& oracle, const LegendreFunction& phi,
                                 const PointSampler& points, std::size_t n_pairs, Rng& rng);

struct SmoothnessReport {
  double worst_lower = kInf;  // min of lin_err + τD over pairs
  double worst_upper = kInf;  // min of M·D − lin_err over pairs
  std::size_t pairs = 0;
  bool pass = false;
};

/// −τD_Φ(y,x) ≤ f(y) − f(x) − ⟨∇f(x), y − x⟩ ≤ M D_Φ(y,x) with slack 1e-9·scale.
SmoothnessReport verify_relative_smoothness(const ModelOracle& oracle, const LegendreFunction& phi,
                                            const PointSampler& points, std::size_t n_pairs,
                                            Rng& rng);

struct VarianceReport {
  double mean_square = 0.0;  // E‖G(x,ξ) − ∇f(x)‖²_*
  double bound = 0.0;        // σ²/2
  double standard_error = 0.0;
  bool pass = false;
};

VarianceReport verify_variance(const ModelOracle& oracle, const LegendreFunction& phi,
                               const Vector& x, std::size_t n_samples, Rng& rng);

struct CurvatureReport {
  double worst_eigenvalue = kInf;  // min eigenvalue of ∇²f + ρ∇²Φ over points
  std::size_t points = 0;
  bool pass = false;
};

/// ∇²f(x) ⪰ −ρ∇²Φ(x) at sampled points (requires a C² objective).
CurvatureReport verify_second_order_weak_convexity(const ModelOracle& oracle,
                                                   const LegendreFunction& phi, double rho,
                                                   const PointSampler& points, std::size_t n,
                                                   Rng& rng);

struct ConvexityReport {
  double worst_violation = 0.0;  // max of f((a+b)/2) − (f(a)+f(b))/2
  bool pass = false;
};

/// Midpoint convexity of y ↦ f_x(y, ξ) on random triples.
ConvexityReport verify_model_convexity(const ModelOracle& oracle, const PointSampler& points,
                                       std::size_t n_triples, Rng& rng);

/// Saddle argmax dominance: g(x, ŵ, ξ) ≥ g(x, w, ξ) for sampled w ∈ W.
ConvexityReport verify_saddle_argmax(const SaddleOracle& oracle, const PointSampler& points,
                                     std::size_t n_trials, Rng& rng);

// ---------------------------------------------------------------- point samplers

PointSampler simplex_sampler(std::size_t dim);
PointSampler ball_sampler(std::size_t dim, double radius);
PointSampler positive_ball_sampler(std::size_t dim, double radius);

}  // namespace bregopt
