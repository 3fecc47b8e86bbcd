#include "bregopt/convex_solver.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace bregopt {

bool Constraint::contains(const Vector& x, double tol) const {
  switch (kind) {
    case ConstraintKind::none:
      return true;
    case ConstraintKind::simplex:
      return x.minCoeff() >= -tol &&
             std::abs(x.sum() - 1.0) <= tol * static_cast<double>(x.size());
    case ConstraintKind::ball:
      return x.norm() <= radius * (1.0 + tol);
  }
  return false;
}

Vector Constraint::pull_inside(const Vector& x) const {
  switch (kind) {
    case ConstraintKind::none:
      return x;
    case ConstraintKind::simplex: {
      Vector y = x.cwiseMax(1e-12);
      return y / y.sum();
    }
    case ConstraintKind::ball: {
      const double n = x.norm();
      if (n <= radius) return x;
      return x * (radius / n);
    }
  }
  return x;
}

bool Region::strictly_feasible(const Vector& x) const {
  if (!x.allFinite()) return false;
  if (domain != DomainKind::all_space && x.minCoeff() <= 0.0) return false;
  return constraint.contains(x, 1e-9);
}

std::string to_string(MinimizeMethod method) {
  switch (method) {
    case MinimizeMethod::closed_form: return "closed_form";
    case MinimizeMethod::newton: return "newton";
    case MinimizeMethod::ellipsoid: return "ellipsoid";
    case MinimizeMethod::bisection: return "bisection";
  }
  return "unknown";
}

namespace {

bool positive_domain(const Region& region) { return region.domain != DomainKind::all_space; }

// Largest step keeping x + a·dx strictly positive, scaled back by 0.99.
double fraction_to_boundary(const Vector& x, const Vector& dx) {
  double a = 1.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (dx[i] < 0.0) a = std::min(a, -0.99 * x[i] / dx[i]);
  }
  return a;
}

std::optional<MinimizeResult> newton(const ConvexObjective& obj, const Region& region,
                                     const Vector& start, const MinimizeOptions& opt) {
  const Eigen::Index d = start.size();
  const bool simplex = region.constraint.kind == ConstraintKind::simplex;
  Vector x = start;
  double f = obj.value(x);
  if (!std::isfinite(f)) return std::nullopt;
  for (int it = 0; it < 200; ++it) {
    const Vector g = obj.subgradient(x);
    const Matrix h = obj.hessian(x);
    Vector dx;
    if (simplex) {
      Matrix kkt = Matrix::Zero(d + 1, d + 1);
      kkt.topLeftCorner(d, d) = h;
      kkt.block(0, d, d, 1).setOnes();
      kkt.block(d, 0, 1, d).setOnes();
      Vector rhs = Vector::Zero(d + 1);
      rhs.head(d) = -g;
      const Vector sol = kkt.fullPivLu().solve(rhs);
      dx = sol.head(d);
      dx.array() -= dx.sum() / static_cast<double>(d);
    } else {
      Eigen::LLT<Matrix> llt(h);
      if (llt.info() != Eigen::Success) return std::nullopt;
      dx = -llt.solve(g);
    }
    if (!dx.allFinite()) return std::nullopt;
    const double dec = -g.dot(dx);
    if (!(dec >= -1e-14 * (1.0 + std::abs(f)))) return std::nullopt;
    // A decrement at rounding level still leaves an argmin error of order √dec; the full
    // step from inside the quadratic region removes it.
    auto finish = [&]() -> std::optional<MinimizeResult> {
      if (!region.constraint.contains(x, 1e-9)) return std::nullopt;
      Vector xn = x + (positive_domain(region) ? fraction_to_boundary(x, dx) : 1.0) * dx;
      if (simplex) xn /= xn.sum();
      const double fn = obj.value(xn);
      if (std::isfinite(fn) && fn <= f + 1e-12 * std::max(1.0, std::abs(f)) &&
          (!positive_domain(region) || xn.minCoeff() > 0.0) &&
          region.constraint.contains(xn, 1e-9)) {
        x = std::move(xn);
        f = std::min(f, fn);
      }
      return MinimizeResult{x, f, it + 1, MinimizeMethod::newton, 0.5 * std::max(dec, 0.0)};
    };
    if (dec <= opt.tol * 1e-3 * std::max(1.0, std::abs(f))) return finish();
    double a = positive_domain(region) ? fraction_to_boundary(x, dx) : 1.0;
    bool moved = false;
    for (int k = 0; k < 80; ++k, a *= 0.5) {
      Vector xn = x + a * dx;
      if (simplex) xn /= xn.sum();
      if (positive_domain(region) && xn.minCoeff() <= 0.0) continue;
      const double fn = obj.value(xn);
      if (std::isfinite(fn) && fn <= f - 1e-4 * a * dec) {
        x = std::move(xn);
        f = fn;
        moved = true;
        break;
      }
    }
    if (!moved) {
      // No measurable decrease left: accept when the decrement is at rounding level.
      if (dec <= 1e-10 * std::max(1.0, std::abs(f))) return finish();
      return std::nullopt;
    }
  }
  return std::nullopt;
}

// Reduced coordinates: on the simplex the last coordinate is eliminated.
struct Lift {
  bool simplex;
  Vector up(const Vector& u) const {
    if (!simplex) return u;
    Vector y(u.size() + 1);
    y.head(u.size()) = u;
    y[u.size()] = 1.0 - u.sum();
    return y;
  }
  Vector down(const Vector& y) const { return simplex ? Vector(y.head(y.size() - 1)) : y; }
  Vector grad_down(const Vector& g) const {
    if (!simplex) return g;
    const Eigen::Index n = g.size() - 1;
    return g.head(n).array() - g[n];
  }
};

// Normal of a violated constraint at y in reduced coordinates, if any.
std::optional<Vector> feasibility_cut(const Region& region, const Lift& lift, const Vector& y) {
  const Eigen::Index n = lift.simplex ? y.size() - 1 : y.size();
  if (positive_domain(region)) {
    Eigen::Index i = 0;
    if (y.minCoeff(&i) <= 0.0) {
      if (lift.simplex && i == n) return Vector::Ones(n).eval();
      Vector a = Vector::Zero(n);
      a[i] = -1.0;
      return a;
    }
  }
  if (region.constraint.kind == ConstraintKind::ball && y.norm() > region.constraint.radius) {
    return lift.down(y / y.norm());
  }
  return std::nullopt;
}

MinimizeResult bisection(const ConvexObjective& obj, const Region& region, const Vector& start,
                         const MinimizeOptions& opt) {
  const bool simplex = region.constraint.kind == ConstraintKind::simplex;
  const Lift lift{simplex};
  auto deriv = [&](double u) {
    return lift.grad_down(obj.subgradient(lift.up(Vector::Constant(1, u))))[0];
  };
  auto val = [&](double u) { return obj.value(lift.up(Vector::Constant(1, u))); };
  const double u0 = lift.down(start)[0];

  std::optional<double> lo_bound;
  std::optional<double> hi_bound;
  if (simplex) {
    lo_bound = 0.0;
    hi_bound = 1.0;
  } else {
    if (positive_domain(region)) lo_bound = 0.0;
    if (region.constraint.kind == ConstraintKind::ball) {
      lo_bound = lo_bound ? std::max(*lo_bound, -region.constraint.radius)
                          : -region.constraint.radius;
      hi_bound = region.constraint.radius;
    }
  }
  const double step0 = std::max(1.0, std::abs(u0));
  double lo = 0.0;
  double hi = 0.0;
  if (lo_bound) {
    lo = *lo_bound;
  } else {
    double s = step0;
    lo = u0 - s;
    for (int k = 0; deriv(lo) > 0.0; ++k) {
      if (k > 200) throw SolverError("one-dimensional objective appears unbounded below");
      s *= 2.0;
      lo = u0 - s;
    }
  }
  if (hi_bound) {
    hi = *hi_bound;
  } else {
    double s = step0;
    hi = u0 + s;
    for (int k = 0; deriv(hi) < 0.0; ++k) {
      if (k > 200) throw SolverError("one-dimensional objective appears unbounded below");
      s *= 2.0;
      hi = u0 + s;
    }
  }
  int it = 0;
  for (; it < 2000 && it < opt.max_iterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double dv = deriv(mid);
    if (dv > 0.0) {
      hi = mid;
    } else if (dv < 0.0) {
      lo = mid;
    } else {
      lo = hi = mid;
      break;
    }
  }
  double best_u = 0.5 * (lo + hi);
  double best_f = val(best_u);
  for (double u : {lo, hi}) {
    const Vector y = lift.up(Vector::Constant(1, u));
    if (!region.strictly_feasible(y)) continue;
    const double f = obj.value(y);
    if (f < best_f) {
      best_f = f;
      best_u = u;
    }
  }
  if (!std::isfinite(best_f)) throw SolverError("bisection ended outside the domain");
  return MinimizeResult{lift.up(Vector::Constant(1, best_u)), best_f, it,
                        MinimizeMethod::bisection, std::abs(deriv(best_u)) * (hi - lo)};
}

bool bounded_region(const Region& region) {
  return region.constraint.kind != ConstraintKind::none;
}

MinimizeResult ellipsoid(const ConvexObjective& obj, const Region& region, const Vector& start,
                         const MinimizeOptions& opt) {
  const bool simplex = region.constraint.kind == ConstraintKind::simplex;
  const Lift lift{simplex};
  const Vector u0 = lift.down(start);
  const Eigen::Index n = u0.size();
  const double nd = static_cast<double>(n);

  double radius = opt.radius_hint > 0.0 ? opt.radius_hint : 2.0 * (1.0 + start.norm());
  if (simplex) radius = 1.5;
  if (region.constraint.kind == ConstraintKind::ball) {
    radius = region.constraint.radius + start.norm() + 1e-9;
  }

  int total_iterations = 0;
  for (int attempt = 0; attempt < 8; ++attempt) {
    Matrix p = Matrix::Identity(n, n) * (radius * radius);
    Vector c = u0;
    Vector best_u = u0;
    double best_f = obj.value(start);
    double lower = -kInf;
    bool exact = false;
    int it = 0;
    bool localized = false;
    for (; it < opt.max_iterations; ++it) {
      const double xtol = opt.xtol * (1.0 + c.norm());
      if (p.trace() <= xtol * xtol) {
        localized = true;
        break;
      }
      const Vector y = lift.up(c);
      Vector a;
      if (auto cut = feasibility_cut(region, lift, y)) {
        a = *cut;
      } else {
        const double f = obj.value(y);
        if (!std::isfinite(f)) throw SolverError("objective infinite at a feasible point");
        a = lift.grad_down(obj.subgradient(y));
        if (f < best_f) {
          best_f = f;
          best_u = c;
        }
        const double gpg = a.dot(p * a);
        if (!(gpg > 0.0)) {
          best_f = f;
          best_u = c;
          exact = true;
          break;
        }
        lower = std::max(lower, f - std::sqrt(gpg));
      }
      const Vector pa = p * a;
      const double apa = a.dot(pa);
      if (!(apa > 0.0) || !std::isfinite(apa)) break;
      const Vector b = pa / std::sqrt(apa);
      c -= b / (nd + 1.0);
      p = (nd * nd / (nd * nd - 1.0)) * (p - (2.0 / (nd + 1.0)) * b * b.transpose());
      p = 0.5 * (p + p.transpose()).eval();
    }
    total_iterations += it;
    // The final center localizes the minimizer more precisely than rounded function values.
    if (localized) {
      const Vector y = lift.up(c);
      if (!feasibility_cut(region, lift, y)) {
        const double f = obj.value(y);
        if (std::isfinite(f) && f <= best_f + opt.tol * std::max(1.0, std::abs(best_f))) {
          best_f = f;
          best_u = c;
        }
      }
    }
    const double gap = exact ? 0.0 : std::max(best_f - lower, 0.0);
    const bool near_edge = !bounded_region(region) && (best_u - u0).norm() > 0.9 * radius;
    if (near_edge) {
      radius *= 10.0;
      continue;
    }
    if (!exact && !localized &&
        !(gap <= std::max(opt.tol, 1e-9) * std::max(1.0, std::abs(best_f)))) {
      throw SolverError("ellipsoid method did not certify its tolerance (gap " +
                        std::to_string(gap) + ")");
    }
    return MinimizeResult{lift.up(best_u), best_f, total_iterations, MinimizeMethod::ellipsoid,
                          gap};
  }
  throw SolverError("minimizer not localized after enlarging the search region");
}

}  // namespace

MinimizeResult minimize_convex(const ConvexObjective& objective, const Region& region,
                               const Vector& start, const MinimizeOptions& options) {
  const bool simplex = region.constraint.kind == ConstraintKind::simplex;
  Vector x0 = region.constraint.pull_inside(start);
  if (simplex && x0.size() == 1) {
    const Vector one = Vector::Ones(1);
    return MinimizeResult{one, objective.value(one), 0, MinimizeMethod::closed_form, 0.0};
  }
  if (!region.strictly_feasible(x0)) {
    throw DomainError("minimize_convex: start point is not strictly feasible");
  }
  if (objective.hessian) {
    if (auto res = newton(objective, region, x0, options)) return *res;
  }
  const Eigen::Index n = simplex ? x0.size() - 1 : x0.size();
  if (n == 1) return bisection(objective, region, x0, options);
  return ellipsoid(objective, region, x0, options);
}

}  // namespace bregopt
