#include "bregopt/subproblem.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <sstream>

namespace bregopt {

// ---------------------------------------------------------------- Regularizer

Regularizer Regularizer::zero() { return Regularizer{}; }

Regularizer Regularizer::indicator_simplex() {
  Regularizer r;
  r.constraint_ = Constraint{ConstraintKind::simplex, 1.0};
  return r;
}

Regularizer Regularizer::indicator_ball(double radius) {
  if (!(radius > 0.0)) throw ConfigError("ball radius must be positive");
  Regularizer r;
  r.constraint_ = Constraint{ConstraintKind::ball, radius};
  return r;
}

Regularizer Regularizer::l1(double weight) {
  if (!(weight >= 0.0)) throw ConfigError("l1 weight must be nonnegative");
  Regularizer r;
  r.penalty_ = PenaltyKind::l1;
  r.weight_ = weight;
  return r;
}

Regularizer Regularizer::quadratic(double weight) {
  if (!(weight >= 0.0)) throw ConfigError("quadratic weight must be nonnegative");
  Regularizer r;
  r.penalty_ = PenaltyKind::quadratic;
  r.weight_ = weight;
  return r;
}

Regularizer Regularizer::entropy_like(double weight, LegendreFunction term) {
  if (!(weight >= 0.0)) throw ConfigError("entropy_like weight must be nonnegative");
  Regularizer r;
  r.penalty_ = PenaltyKind::entropy_like;
  r.weight_ = weight;
  r.term_ = std::move(term);
  return r;
}

Regularizer Regularizer::with_constraint(Constraint constraint) const {
  Regularizer r = *this;
  r.constraint_ = constraint;
  return r;
}

std::string Regularizer::describe() const {
  std::ostringstream out;
  switch (penalty_) {
    case PenaltyKind::zero: out << "zero"; break;
    case PenaltyKind::l1: out << "l1(" << weight_ << ")"; break;
    case PenaltyKind::quadratic: out << "quadratic(" << weight_ << ")"; break;
    case PenaltyKind::entropy_like:
      out << "entropy_like(" << weight_ << "*" << to_string(term_->kind()) << ")";
      break;
  }
  switch (constraint_.kind) {
    case ConstraintKind::none: break;
    case ConstraintKind::simplex: out << "+indicator_simplex"; break;
    case ConstraintKind::ball: out << "+indicator_ball(" << constraint_.radius << ")"; break;
  }
  return out.str();
}

double Regularizer::penalty_value(const Vector& x) const {
  switch (penalty_) {
    case PenaltyKind::zero: return 0.0;
    case PenaltyKind::l1: return weight_ * x.lpNorm<1>();
    case PenaltyKind::quadratic: return 0.5 * weight_ * x.squaredNorm();
    case PenaltyKind::entropy_like: {
      if (weight_ == 0.0) return term_->in_domain(x) ? 0.0 : kInf;
      return weight_ * term_->value(x);
    }
  }
  return 0.0;
}

double Regularizer::value(const Vector& x) const {
  if (!constraint_.contains(x, 1e-9)) return kInf;
  return penalty_value(x);
}

Vector Regularizer::subgradient(const Vector& x) const {
  switch (penalty_) {
    case PenaltyKind::zero: return Vector::Zero(x.size());
    case PenaltyKind::l1: return weight_ * x.array().sign().matrix();
    case PenaltyKind::quadratic: return weight_ * x;
    case PenaltyKind::entropy_like: return weight_ * term_->gradient(x);
  }
  return Vector::Zero(x.size());
}

std::optional<Matrix> Regularizer::hessian(const Vector& x) const {
  const Eigen::Index d = x.size();
  switch (penalty_) {
    case PenaltyKind::zero: return Matrix::Zero(d, d);
    case PenaltyKind::l1: return std::nullopt;
    case PenaltyKind::quadratic: return Matrix::Identity(d, d) * weight_;
    case PenaltyKind::entropy_like: return weight_ * term_->hessian(x);
  }
  return std::nullopt;
}

double Regularizer::infimum(std::size_t dim) const {
  const double d = static_cast<double>(dim);
  const bool simplex = constraint_.kind == ConstraintKind::simplex;
  const bool ball = constraint_.kind == ConstraintKind::ball;
  switch (penalty_) {
    case PenaltyKind::zero: return 0.0;
    case PenaltyKind::l1: return simplex ? weight_ : 0.0;
    case PenaltyKind::quadratic: return simplex ? 0.5 * weight_ / d : 0.0;
    case PenaltyKind::entropy_like: break;
  }
  if (weight_ == 0.0) return 0.0;
  const LegendreFunction& t = *term_;
  if (simplex) return weight_ * t.value(Vector::Constant(dim, 1.0 / d));
  if (auto terms = t.radial_terms()) return 0.0;
  if (t.kind() == LegendreKind::shannon_entropy) {
    // Separable minimum at x_i = 1/e, or on the sphere when the ball excludes it.
    double xi = std::exp(-1.0);
    if (ball) xi = std::min(xi, constraint_.radius / std::sqrt(d));
    return weight_ * d * xi * std::log(xi);
  }
  if (t.kind() == LegendreKind::burg) {
    if (!ball) return -kInf;
    return -weight_ * d * std::log(constraint_.radius / std::sqrt(d));
  }
  throw ConfigError("infimum not available for regularizer " + describe());
}

double Regularizer::mu_relative(const LegendreFunction& phi) const {
  if (penalty_ == PenaltyKind::entropy_like && *term_ == phi) return weight_;
  if (penalty_ == PenaltyKind::quadratic && phi.kind() == LegendreKind::euclidean) return weight_;
  return 0.0;
}

// ---------------------------------------------------------------- helpers

Vector project_simplex(const Vector& v) {
  const Eigen::Index d = v.size();
  std::vector<double> u(v.data(), v.data() + d);
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumsum = 0.0;
  double theta = 0.0;
  for (Eigen::Index j = 0; j < d; ++j) {
    cumsum += u[j];
    const double t = (cumsum - 1.0) / static_cast<double>(j + 1);
    if (u[j] - t > 0.0) theta = t;
  }
  return (v.array() - theta).cwiseMax(0.0).matrix();
}

double solve_radial_equation(const std::vector<RadialTerm>& terms, double target) {
  if (!(target >= 0.0) || !std::isfinite(target)) {
    throw SolverError("radial equation: target must be finite and nonnegative");
  }
  if (target == 0.0) return 0.0;
  auto h = [&](double s) {
    double acc = 0.0;
    for (const auto& t : terms) acc += t.coeff * t.power * std::pow(s, t.power - 1);
    return acc;
  };
  auto dh = [&](double s) {
    double acc = 0.0;
    for (const auto& t : terms) {
      acc += t.coeff * t.power * (t.power - 1) * std::pow(s, t.power - 2);
    }
    return acc;
  };
  double lo = 0.0;
  double hi = 1.0;
  for (int k = 0; h(hi) < target; ++k) {
    if (k > 2000) throw SolverError("radial equation: no bracket found");
    lo = hi;
    hi *= 2.0;
  }
  double s = 0.5 * (lo + hi);
  for (int it = 0; it < 300; ++it) {
    const double r = h(s) - target;
    if (r == 0.0) return s;
    if (r > 0.0) hi = s; else lo = s;
    if (std::abs(r) <= 4.0 * kEps * target || hi - lo <= 2.0 * kEps * hi) return s;
    const double slope = dh(s);
    double next = slope > 0.0 ? s - r / slope : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    s = next;
  }
  throw SolverError("radial equation: root finder did not converge");
}

namespace {

// Affine-model minimizer in closed form, when (r, Φ) matches a registered pattern.
std::optional<Vector> linear_closed_form(const Vector& v, const Regularizer& r,
                                         const LegendreFunction& phi, const Vector& z,
                                         double eta) {
  const ConstraintKind ck = r.constraint().kind;
  const PenaltyKind pk = r.penalty();
  const double w = r.weight();

  if (phi.kind() == LegendreKind::euclidean) {
    double shrink = 0.0;  // weight of a (w/2)‖x‖² penalty
    if (pk == PenaltyKind::quadratic) shrink = w;
    if (pk == PenaltyKind::entropy_like) {
      if (r.term()->kind() != LegendreKind::euclidean) return std::nullopt;
      shrink = w;
    }
    if (pk == PenaltyKind::l1) {
      if (ck == ConstraintKind::simplex) return project_simplex(z - eta * v);
      if (ck != ConstraintKind::none) return std::nullopt;
      const Vector y = z - eta * v;
      const double t = eta * w;
      return (y.array().sign() * (y.array().abs() - t).cwiseMax(0.0)).matrix().eval();
    }
    Vector y = z - eta * v;
    if (shrink != 0.0) y /= (1.0 + eta * shrink);
    if (ck == ConstraintKind::simplex) return project_simplex(y);
    if (ck == ConstraintKind::ball) return r.constraint().pull_inside(y);
    return y;
  }

  if (auto phi_terms = phi.radial_terms()) {
    if (ck == ConstraintKind::simplex || pk == PenaltyKind::l1) return std::nullopt;
    std::vector<RadialTerm> terms = *phi_terms;
    if (pk == PenaltyKind::quadratic) terms.push_back({eta * 0.5 * w, 2});
    if (pk == PenaltyKind::entropy_like) {
      auto pen = r.term()->radial_terms();
      if (!pen) return std::nullopt;
      for (auto t : *pen) terms.push_back({eta * w * t.coeff, t.power});
    }
    const Vector target = phi.gradient(z) - eta * v;
    const double norm = target.norm();
    if (norm == 0.0) return Vector::Zero(z.size()).eval();
    double s = solve_radial_equation(terms, norm);
    if (ck == ConstraintKind::ball) s = std::min(s, r.constraint().radius);
    return (target * (s / norm)).eval();
  }

  const bool orthant_phi =
      phi.kind() == LegendreKind::shannon_entropy || phi.kind() == LegendreKind::burg;
  if (!orthant_phi || ck == ConstraintKind::ball || pk == PenaltyKind::quadratic) {
    return std::nullopt;
  }
  double mult = 0.0;  // weight of a w·Φ penalty
  Vector vv = v;
  if (pk == PenaltyKind::l1) vv.array() += w;  // ‖x‖₁ = Σx on the orthant
  if (pk == PenaltyKind::entropy_like) {
    if (!(*r.term() == phi)) return std::nullopt;
    mult = w;
  }
  const double denom = 1.0 + eta * mult;

  if (phi.kind() == LegendreKind::shannon_entropy) {
    Vector logx = (z.array().log() - eta * vv.array()).matrix();
    if (ck == ConstraintKind::simplex) {
      logx /= denom;
      logx.array() -= logx.maxCoeff();
      Vector x = logx.array().exp().matrix();
      x /= x.sum();
      return x.cwiseMax(DBL_MIN).eval();
    }
    logx.array() -= eta * mult;
    logx /= denom;
    return logx.array().exp().cwiseMax(DBL_MIN).matrix().eval();
  }

  // Burg: ∇Φ(x) = −1/x.
  const Vector theta = ((-z.array().inverse()) - eta * vv.array()).matrix() / denom;
  if (ck == ConstraintKind::none) {
    if (theta.maxCoeff() >= 0.0) {
      throw SolverError("Burg step has no minimizer (objective unbounded below)");
    }
    return (-theta.array().inverse()).matrix().eval();
  }
  // Simplex: x_i = 1/(ν − θ_i) with Σx_i = 1, ν > max θ.
  const double d = static_cast<double>(z.size());
  const double tmax = theta.maxCoeff();
  double lo = tmax;
  double hi = tmax + d;
  auto excess = [&](double nu) { return (nu - theta.array()).inverse().sum() - 1.0; };
  for (int it = 0; it < 400 && hi - lo > 4.0 * kEps * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (excess(mid) > 0.0) lo = mid; else hi = mid;
  }
  Vector x = (hi - theta.array()).inverse().matrix();
  return (x / x.sum()).eval();
}

double step_objective(const StepModel& model, const Regularizer& r, const LegendreFunction& phi,
                      const Vector& z, double eta, const Vector& y) {
  return model_value(model, y) + r.value(y) + phi.bregman(y, z) / eta;
}

ProxStepResult certify(ProxStepResult res, const StepModel& model, const Regularizer& r,
                       const LegendreFunction& phi, const Vector& z, double eta,
                       const ProxOptions& opt) {
  const double obj_z = step_objective(model, r, phi, z, eta, z);
  res.objective_decrease = obj_z - step_objective(model, r, phi, z, eta, res.minimizer);
  if (opt.probes <= 0) {
    res.three_point_residual = 0.0;
    return res;
  }
  auto g = [&](const Vector& y) { return eta * (model_value(model, y) + r.value(y)); };
  const auto probes = three_point_probes(r, phi, z, res.minimizer, opt.probes, opt.probe_seed);
  const auto report = check_three_point(g, phi, z, res.minimizer, probes, eta * opt.rho);
  res.three_point_residual = report.residual;
  const double scale = 1.0 + std::abs(g(z));
  if (opt.require_certificate && report.residual < -opt.inner_tol * scale) {
    std::ostringstream msg;
    msg << "prox step failed its three-point certificate (residual " << report.residual << ")";
    throw SolverError(msg.str());
  }
  return res;
}

}  // namespace

// ---------------------------------------------------------------- steps

ProxStepResult prox_step(const StepModel& model, const Regularizer& r, const LegendreFunction& phi,
                         const Vector& center, double eta, const ProxOptions& options) {
  if (!(eta > 0.0)) throw ConfigError("prox_step: step size must be positive");
  if (eta * options.rho >= 1.0) throw ConfigError("prox_step: requires eta * rho < 1");
  if (!phi.in_interior(center)) throw DomainError("prox_step: center is not interior");
  if (eta < 1e-14) return ProxStepResult{center, 0, 0.0, 0.0, MinimizeMethod::closed_form};

  ProxStepResult res;
  if (const auto* lin = std::get_if<LinearModel>(&model)) {
    if (auto x = linear_closed_form(lin->direction, r, phi, center, eta)) {
      res.minimizer = std::move(*x);
      res.method = MinimizeMethod::closed_form;
      return certify(std::move(res), model, r, phi, center, eta, options);
    }
  }
  if (const auto* abs = std::get_if<AbsLinearModel>(&model)) {
    // Dual in s ∈ [−1,1]: y(s) minimizes s·w·⟨β,y⟩ + r + D/η; the model argument at y(s)
    // is nonincreasing in s and vanishes at the optimal s unless s hits ±1.
    auto primal = [&](double s) {
      return linear_closed_form(s * abs->weight * abs->slope, r, phi, center, eta);
    };
    auto arg = [&](const Vector& y) { return abs->offset + abs->slope.dot(y - abs->base); };
    if (auto yp = primal(1.0)) {
      Vector y = *yp;
      int it = 0;
      if (arg(y) < 0.0) {
        auto ym = primal(-1.0);
        if (arg(*ym) <= 0.0) {
          y = *ym;
        } else {
          double lo = -1.0;
          double hi = 1.0;
          for (; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            const double a = arg(*primal(mid));
            if (a > 0.0) lo = mid;
            else if (a < 0.0) hi = mid;
            else { lo = hi = mid; break; }
          }
          // Both bracket ends are candidates; keep the better objective.
          const Vector ylo = *primal(lo);
          const Vector yhi = *primal(hi);
          y = step_objective(model, r, phi, center, eta, ylo) <=
                      step_objective(model, r, phi, center, eta, yhi)
                  ? ylo
                  : yhi;
        }
      }
      res.minimizer = std::move(y);
      res.inner_iterations = it;
      res.method = MinimizeMethod::bisection;
      return certify(std::move(res), model, r, phi, center, eta, options);
    }
  }

  ConvexObjective g;
  g.value = [&model](const Vector& y) { return model_value(model, y); };
  g.subgradient = [&model](const Vector& y) { return model_subgradient(model, y); };
  if (model_hessian(model, center)) {
    g.hessian = [&model](const Vector& y) { return *model_hessian(model, y); };
  }
  res = inner_solve(g, r, phi, center, eta, options.inner_tol);
  return certify(std::move(res), model, r, phi, center, eta, options);
}

ProxStepResult prox_step_radial(const Vector& direction, const Regularizer& r,
                                const LegendreFunction& phi, const Vector& center, double eta) {
  const auto terms = phi.radial_terms();
  if (!terms) throw ConfigError("prox_step_radial: Φ is not radial");
  if (r.penalty() != PenaltyKind::zero || r.constraint().kind == ConstraintKind::simplex) {
    throw ConfigError("prox_step_radial: r must be zero or a ball indicator");
  }
  if (!(eta > 0.0)) throw ConfigError("prox_step_radial: step size must be positive");
  ProxStepResult res;
  res.method = MinimizeMethod::closed_form;
  if (eta < 1e-14 || direction.isZero(0.0)) {
    res.minimizer = r.constraint().pull_inside(center);
  } else {
    const Vector target = phi.gradient(center) - eta * direction;
    const double norm = target.norm();
    if (norm == 0.0) {
      res.minimizer = Vector::Zero(center.size());
    } else {
      double s = solve_radial_equation(*terms, norm);
      if (r.constraint().kind == ConstraintKind::ball) s = std::min(s, r.constraint().radius);
      res.minimizer = target * (s / norm);
    }
  }
  const LinearModel model{0.0, direction, center};
  const double obj_z = step_objective(model, r, phi, center, eta, center);
  res.objective_decrease = obj_z - step_objective(model, r, phi, center, eta, res.minimizer);
  return res;
}

ProxStepResult inner_solve(const ConvexObjective& g, const Regularizer& r,
                           const LegendreFunction& phi, const Vector& center, double eta,
                           double tol) {
  if (!(tol > 0.0)) throw ConfigError("inner_solve: tolerance must be positive");
  if (!(eta > 0.0)) throw ConfigError("inner_solve: step size must be positive");
  if (eta < 1e-14) return ProxStepResult{center, 0, 0.0, 0.0, MinimizeMethod::closed_form};
  const Vector grad_z = phi.gradient(center);
  ConvexObjective obj;
  obj.value = [&](const Vector& y) {
    const double d = phi.bregman(y, center);
    if (!std::isfinite(d)) return kInf;
    return g.value(y) + r.penalty_value(y) + d / eta;
  };
  obj.subgradient = [&](const Vector& y) -> Vector {
    return g.subgradient(y) + r.subgradient(y) + (phi.gradient(y) - grad_z) / eta;
  };
  if (g.hessian && r.penalty() != PenaltyKind::l1) {
    obj.hessian = [&](const Vector& y) -> Matrix {
      return g.hessian(y) + *r.hessian(y) + phi.hessian(y) / eta;
    };
  }
  const Region region{phi.domain(), r.constraint()};
  MinimizeOptions mo;
  mo.tol = std::max(tol * 1e-3, 1e-15);
  const MinimizeResult m = minimize_convex(obj, region, center, mo);
  ProxStepResult res;
  res.minimizer = m.argmin;
  res.inner_iterations = m.iterations;
  res.method = m.method;
  res.objective_decrease = obj.value(center) - m.value;
  return res;
}

// ---------------------------------------------------------------- three-point

ThreePointReport check_three_point(const std::function<double(const Vector&)>& g,
                                   const LegendreFunction& phi, const Vector& z,
                                   const Vector& z_plus, const std::vector<Vector>& probes,
                                   double curvature) {
  ThreePointReport report;
  const double base = g(z_plus) + phi.bregman(z_plus, z);
  const bool plus_interior = phi.in_interior(z_plus);
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const Vector& x = probes[i];
    const double lhs = g(x) + phi.bregman(x, z);
    double tail = 0.0;
    if (x != z_plus) {
      tail = plus_interior ? phi.bregman(x, z_plus) : kInf;
    }
    const double res = lhs - (base + (1.0 - curvature) * tail);
    if (res < report.residual) {
      report.residual = res;
      report.worst_probe = i;
    }
  }
  return report;
}

std::vector<Vector> three_point_probes(const Regularizer& r, const LegendreFunction& phi,
                                       const Vector& z, const Vector& z_plus, int count,
                                       std::uint64_t seed) {
  std::vector<Vector> probes;
  if (count <= 0) return probes;
  probes.push_back(z);
  if (count >= 2) probes.push_back(z_plus);
  Rng rng = make_rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::exponential_distribution<double> expo(1.0);
  const Eigen::Index d = z.size();
  const bool positive = phi.domain() != DomainKind::all_space;
  while (static_cast<int>(probes.size()) < count) {
    Vector w(d);
    switch (r.constraint().kind) {
      case ConstraintKind::simplex:
        for (Eigen::Index i = 0; i < d; ++i) w[i] = expo(rng) + 1e-300;
        w /= w.sum();
        break;
      case ConstraintKind::ball: {
        for (Eigen::Index i = 0; i < d; ++i) w[i] = normal(rng);
        const double rad =
            r.constraint().radius * std::pow(unif(rng), 1.0 / static_cast<double>(d));
        w *= rad / std::max(w.norm(), 1e-300);
        if (positive) w = w.cwiseAbs().cwiseMax(1e-12);
        break;
      }
      case ConstraintKind::none:
        if (positive) {
          for (Eigen::Index i = 0; i < d; ++i) w[i] = z_plus[i] * std::exp(normal(rng));
        } else {
          const double scale = 1.0 + z_plus.norm();
          for (Eigen::Index i = 0; i < d; ++i) w[i] = z_plus[i] + scale * normal(rng);
        }
        break;
    }
    const double u = unif(rng);
    const double t = u * u;
    Vector x = z_plus + t * (w - z_plus);
    if (!phi.in_interior(x) || !std::isfinite(r.value(x))) continue;
    probes.push_back(std::move(x));
  }
  return probes;
}

}  // namespace bregopt
