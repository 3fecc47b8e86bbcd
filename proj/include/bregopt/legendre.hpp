#pragma once

#include "bregopt/types.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace bregopt {

enum class LegendreKind {
  euclidean,        // ½‖x‖²
  shannon_entropy,  // Σ x_i log x_i on the nonnegative orthant
  burg,             // −Σ log x_i on the open positive orthant
  poly_growth,      // Σ a_i (3i+7)/(i+2) ‖x‖^{i+2}
  norm_power_sum,   // Σ b_i/(i+2) ‖x‖^{i+2}
  weighted_sum,     // Σ w_j Φ_j
};

enum class DomainKind { all_space, positive_orthant, open_positive_orthant };

enum class NormKind { l2, l1 };

std::string_view to_string(LegendreKind kind);
std::string_view to_string(DomainKind kind);
LegendreKind legendre_kind_from_string(std::string_view name);

/// Strong convexity of Φ: D_Φ(y,x) ≥ (modulus/2)‖y−x‖² in `norm`. When
/// `simplex_only` is set the bound holds only for points on the unit simplex.
struct StrongConvexity {
  double modulus = 0.0;
  NormKind norm = NormKind::l2;
  bool simplex_only = false;
};

/// One term c‖x‖^k of a radially symmetric Legendre function (k ≥ 2).
struct RadialTerm {
  double coeff;
  int power;
};

/// Immutable description of a Legendre function Φ together with its derivatives.
class LegendreFunction {
 public:
  static LegendreFunction euclidean();
  static LegendreFunction shannon_entropy();
  static LegendreFunction burg();
  /// Φ(x) = Σ a_i (3i+7)/(i+2) ‖x‖^{i+2}; adapted to a growth polynomial p(u) = Σ a_i u^i.
  static LegendreFunction poly_growth(std::vector<double> a);
  /// Φ(x) = Σ b_i/(i+2) ‖x‖^{i+2}.
  static LegendreFunction norm_power_sum(std::vector<double> b);
  static LegendreFunction weighted_sum(std::vector<LegendreFunction> children,
                                       std::vector<double> weights);

  LegendreKind kind() const { return kind_; }
  const std::vector<double>& coeffs() const { return coeffs_; }
  const std::vector<LegendreFunction>& children() const { return children_; }
  const std::vector<double>& weights() const { return weights_; }

  DomainKind domain() const;
  std::optional<StrongConvexity> strong_convexity() const;
  NormKind primal_norm() const;

  bool in_domain(const Vector& x) const;
  bool in_interior(const Vector& x) const;

  /// Φ(x), +∞ outside dom Φ.
  double value(const Vector& x) const;
  /// ∇Φ(x); throws DomainError unless x is interior.
  Vector gradient(const Vector& x) const;
  /// Dense ∇²Φ(x); throws DomainError unless x is interior.
  Matrix hessian(const Vector& x) const;
  Vector hessian_apply(const Vector& x, const Vector& v) const;
  /// D_Φ(y,x), evaluated in a cancellation-aware form for each kind.
  double bregman(const Vector& y, const Vector& x) const;

  /// The norm-power expansion when Φ is radial (euclidean, poly, norm-power and sums thereof).
  std::optional<std::vector<RadialTerm>> radial_terms() const;

  bool operator==(const LegendreFunction& other) const;

 private:
  LegendreFunction(LegendreKind kind, std::vector<double> coeffs,
                   std::vector<LegendreFunction> children, std::vector<double> weights);

  LegendreKind kind_;
  std::vector<double> coeffs_;
  std::vector<LegendreFunction> children_;
  std::vector<double> weights_;
};

/// Context for the local norm ‖y‖_x = ‖∇²Φ(x) y‖_* at a fixed interior base point.
class LocalNormContext {
 public:
  LocalNormContext(const LegendreFunction& phi, const Vector& base_point);

  const Vector& base_point() const { return base_point_; }
  const Matrix& hessian_factor() const { return hessian_; }
  double primal(const Vector& y) const;
  /// ‖∇²Φ(x)^{-1} v‖; throws SolverError when the Hessian is singular.
  double dual(const Vector& v) const;

 private:
  Vector base_point_;
  Matrix hessian_;
  NormKind norm_;
  Eigen::LDLT<Matrix> factor_;
};

double norm_of(const Vector& v, NormKind norm);
double dual_norm_of(const Vector& v, NormKind norm);

double phi_value(const LegendreFunction& phi, const Vector& x);
Vector phi_gradient(const LegendreFunction& phi, const Vector& x);
double bregman(const LegendreFunction& phi, const Vector& y, const Vector& x);
Vector hessian_apply(const LegendreFunction& phi, const Vector& x, const Vector& v);
double local_dual_norm(const LegendreFunction& phi, const Vector& x, const Vector& v);

LegendreFunction build_poly_legendre(const std::vector<double>& p_coeffs);
/// Sum of the accuracy-adapted function for p and the Lipschitz-adapted function for q.
/// Empty or all-zero lists drop the corresponding part.
LegendreFunction build_composite_legendre(const std::vector<double>& p_coeffs,
                                          const std::vector<double>& q_coeffs);

}  // namespace bregopt
