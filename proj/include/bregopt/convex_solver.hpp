#pragma once

#include "bregopt/legendre.hpp"

#include <functional>
#include <string>

namespace bregopt {

enum class ConstraintKind { none, simplex, ball };

/// Closed convex set carried by a regularizer: nothing, the unit simplex, or a centered ℓ₂ ball.
struct Constraint {
  ConstraintKind kind = ConstraintKind::none;
  double radius = 1.0;

  bool contains(const Vector& x, double tol = 1e-12) const;
  /// Moves a point inside the set (normalization for the simplex, radial scaling for the ball).
  Vector pull_inside(const Vector& x) const;
};

/// Feasible region of a Bregman subproblem: int(dom Φ) intersected with a constraint.
struct Region {
  DomainKind domain = DomainKind::all_space;
  Constraint constraint;

  bool strictly_feasible(const Vector& x) const;
};

/// Convex function with first-order access and optional second-order access.
struct ConvexObjective {
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> subgradient;
  std::function<Matrix(const Vector&)> hessian;  // empty when nonsmooth
};

enum class MinimizeMethod { closed_form, newton, ellipsoid, bisection };

std::string to_string(MinimizeMethod method);

struct MinimizeOptions {
  double tol = 1e-13;        // relative optimality-gap target
  double xtol = 1e-12;       // relative size of the final localization set (ellipsoid)
  int max_iterations = 40000;
  double radius_hint = 0.0;  // initial localization radius; 0 picks one from the start point
};

struct MinimizeResult {
  Vector argmin;
  double value = kInf;
  int iterations = 0;
  MinimizeMethod method = MinimizeMethod::newton;
  double certified_gap = kInf;  // upper bound on value − min (NaN when no bound is available)
};

/// Minimizes a convex objective over a region. Smooth objectives use damped Newton
/// (with an equality-constrained KKT step on the simplex); nonsmooth ones use bisection
/// on one-dimensional regions and the central-cut ellipsoid method otherwise.
MinimizeResult minimize_convex(const ConvexObjective& objective, const Region& region,
                               const Vector& start, const MinimizeOptions& options = {});

}  // namespace bregopt
