#pragma once

#include "bregopt/convex_solver.hpp"
#include "bregopt/legendre.hpp"
#include "bregopt/step_model.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace bregopt {

enum class PenaltyKind { zero, l1, quadratic, entropy_like };

/// r = penalty + indicator of a constraint set. The penalty is one of 0, w‖x‖₁,
/// (w/2)‖x‖², or w·Φ₀ for a Legendre function Φ₀.
class Regularizer {
 public:
  static Regularizer zero();
  static Regularizer indicator_simplex();
  static Regularizer indicator_ball(double radius);
  static Regularizer l1(double weight);
  static Regularizer quadratic(double weight);
  static Regularizer entropy_like(double weight, LegendreFunction term);

  Regularizer with_constraint(Constraint constraint) const;

  PenaltyKind penalty() const { return penalty_; }
  double weight() const { return weight_; }
  const Constraint& constraint() const { return constraint_; }
  const std::optional<LegendreFunction>& term() const { return term_; }
  std::string describe() const;

  /// r(x), +∞ off the constraint set or off the penalty's domain.
  double value(const Vector& x) const;
  /// Penalty part alone, ignoring the constraint.
  double penalty_value(const Vector& x) const;
  /// Subgradient of the penalty part (sign(x) with 0 at 0 for ℓ₁).
  Vector subgradient(const Vector& x) const;
  /// Hessian of the penalty part; nullopt for ℓ₁.
  std::optional<Matrix> hessian(const Vector& x) const;
  /// inf r over its domain in dimension `dim`; −∞ when unbounded below.
  double infimum(std::size_t dim) const;
  /// μ with r − μΦ convex for the given Φ (0 unless the penalty is a multiple of Φ).
  double mu_relative(const LegendreFunction& phi) const;

 private:
  PenaltyKind penalty_ = PenaltyKind::zero;
  double weight_ = 0.0;
  Constraint constraint_;
  std::optional<LegendreFunction> term_;
};

struct ProxOptions {
  double inner_tol = 1e-10;
  int probes = 8;                  // three-point probes evaluated per step; 0 disables
  std::uint64_t probe_seed = 0x7f4a7c15ULL;
  double rho = 0.0;                // weak convexity of the model relative to Φ
  bool require_certificate = true; // throw when the residual is below −inner_tol·scale
};

struct ProxStepResult {
  Vector minimizer;
  int inner_iterations = 0;
  double three_point_residual = 0.0;
  double objective_decrease = 0.0;
  MinimizeMethod method = MinimizeMethod::closed_form;
};

/// argmin_y { model(y) + r(y) + D_Φ(y, z)/η }.
ProxStepResult prox_step(const StepModel& model, const Regularizer& r, const LegendreFunction& phi,
                         const Vector& center, double eta, const ProxOptions& options = {});

/// Step for affine models under a radial Φ: solves ∇Φ(x⁺) = ∇Φ(z) − ηv by a scalar root.
/// r must be zero or a ball indicator.
ProxStepResult prox_step_radial(const Vector& direction, const Regularizer& r,
                                const LegendreFunction& phi, const Vector& center, double eta);

/// Iterative solution of argmin_y { g(y) + r(y) + D_Φ(y, z)/η } for a convex g.
ProxStepResult inner_solve(const ConvexObjective& g, const Regularizer& r,
                           const LegendreFunction& phi, const Vector& center, double eta,
                           double tol);

/// Unique s ≥ 0 with Σ c_k k s^{k−1} = target for the radial terms of Φ.
double solve_radial_equation(const std::vector<RadialTerm>& terms, double target);

struct ThreePointReport {
  double residual = kInf;   // min over probes; ≥ 0 for an exact minimizer
  std::size_t worst_probe = 0;
};

/// min over probes x of [g(x) + D(x,z)] − [g(z⁺) + D(z⁺,z) + (1 − curvature)·D(x,z⁺)], where
/// g already carries the factor η. `curvature` is ηρ for weakly convex g.
ThreePointReport check_three_point(const std::function<double(const Vector&)>& g,
                                   const LegendreFunction& phi, const Vector& z,
                                   const Vector& z_plus, const std::vector<Vector>& probes,
                                   double curvature = 0.0);

/// Random feasible probe points for three-point checks: z, z⁺ and mixtures toward random
/// points of the feasible region.
std::vector<Vector> three_point_probes(const Regularizer& r, const LegendreFunction& phi,
                                       const Vector& z, const Vector& z_plus, int count,
                                       std::uint64_t seed);

/// Euclidean projection onto the unit simplex.
Vector project_simplex(const Vector& v);

}  // namespace bregopt
