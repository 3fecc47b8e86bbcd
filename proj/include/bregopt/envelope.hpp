#pragma once

#include "bregopt/problem_instance.hpp"

#include <optional>

namespace bregopt {

/// F = f + r with f possibly weakly convex relative to Φ.
struct EnvelopeProblem {
  ConvexObjective f;
  Regularizer r;
  double weak_convexity = 0.0;  // τ + ρ

  static EnvelopeProblem from(const ProblemInstance& problem);
  double F(const Vector& x) const { return f.value(x) + r.value(x); }
};

enum class EnvelopePath { direct, conjugate };

struct EnvelopeReport {
  Vector prox_point;
  double divergence = 0.0;
  double envelope_value_direct = 0.0;
  double envelope_value_conjugate = 0.0;
  Vector envelope_gradient;
  double local_dual_norm_of_gradient = 0.0;
  /// √D − (λ/√2)‖∇F_λ‖*_x, present only when Φ is 1-strongly convex on the problem's domain.
  std::optional<double> lower_bound_check;
};

struct EnvelopeOptions {
  double tol = 1e-10;
  bool certify = true;  // three-point certificate on the prox point
  int probes = 16;
};

/// argmin_y { F(y) + D_Φ(y, x)/λ }.
Vector bregman_prox_point(const EnvelopeProblem& problem, const LegendreFunction& phi,
                          const Vector& x, double lambda, const EnvelopeOptions& options = {});

double envelope_value(const EnvelopeProblem& problem, const LegendreFunction& phi, const Vector& x,
                      double lambda, EnvelopePath path, const EnvelopeOptions& options = {});

/// (1/λ)∇²Φ(x)(x − x̂).
Vector envelope_gradient(const EnvelopeProblem& problem, const LegendreFunction& phi,
                         const Vector& x, double lambda, const EnvelopeOptions& options = {});

EnvelopeReport stationarity(const EnvelopeProblem& problem, const LegendreFunction& phi,
                            const Vector& x, double lambda, const EnvelopeOptions& options = {});

/// Only the divergence D_Φ(x̂, x) and the local dual norm of the gradient (no conjugate path).
struct StationaritySummary {
  double divergence = 0.0;
  double gradient_local_norm = 0.0;
};

StationaritySummary stationarity_summary(const EnvelopeProblem& problem,
                                         const LegendreFunction& phi, const Vector& x,
                                         double lambda, const EnvelopeOptions& options = {});

/// Whether Φ is 1-strongly convex on the region where the problem lives.
bool phi_unit_strongly_convex(const LegendreFunction& phi, const Regularizer& r);

}  // namespace bregopt
