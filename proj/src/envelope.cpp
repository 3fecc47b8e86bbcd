#include "bregopt/envelope.hpp"

#include <cmath>
#include <sstream>

namespace bregopt {

EnvelopeProblem EnvelopeProblem::from(const ProblemInstance& problem) {
  EnvelopeProblem ep;
  OraclePtr oracle = problem.oracle;
  ep.f.value = [oracle](const Vector& y) { return oracle->f_value(y); };
  ep.f.subgradient = [oracle](const Vector& y) { return oracle->f_subgradient(y); };
  if (oracle->f_smooth()) {
    ep.f.hessian = [oracle](const Vector& y) { return *oracle->f_hessian(y); };
  }
  ep.r = problem.regularizer;
  const auto& k = oracle->constants();
  ep.weak_convexity = problem.regime == Regime::C ? 0.0 : k.tau + k.rho;
  return ep;
}

bool phi_unit_strongly_convex(const LegendreFunction& phi, const Regularizer& r) {
  const auto sc = phi.strong_convexity();
  if (!sc || sc->modulus < 1.0) return false;
  if (sc->simplex_only) return r.constraint().kind == ConstraintKind::simplex;
  return true;
}

namespace {

void check_lambda(const EnvelopeProblem& problem, double lambda) {
  if (!(lambda > 0.0)) throw ConfigError("envelope: lambda must be positive");
  if (lambda * problem.weak_convexity >= 1.0) {
    throw ConfigError("envelope: requires lambda * (tau + rho) < 1");
  }
}

}  // namespace

Vector bregman_prox_point(const EnvelopeProblem& problem, const LegendreFunction& phi,
                          const Vector& x, double lambda, const EnvelopeOptions& options) {
  check_lambda(problem, lambda);
  const ProxStepResult res = inner_solve(problem.f, problem.r, phi, x, lambda, options.tol);
  if (options.certify && options.probes > 0) {
    auto g = [&](const Vector& y) { return lambda * problem.F(y); };
    const auto probes = three_point_probes(problem.r, phi, x, res.minimizer, options.probes,
                                           0x2545f491ULL);
    const auto rep = check_three_point(g, phi, x, res.minimizer, probes,
                                       lambda * problem.weak_convexity);
    if (rep.residual < -options.tol * (1.0 + std::abs(g(x)))) {
      std::ostringstream msg;
      msg << "prox point failed its three-point certificate (residual " << rep.residual << ")";
      throw SolverError(msg.str());
    }
  }
  return res.minimizer;
}

double envelope_value(const EnvelopeProblem& problem, const LegendreFunction& phi, const Vector& x,
                      double lambda, EnvelopePath path, const EnvelopeOptions& options) {
  check_lambda(problem, lambda);
  if (path == EnvelopePath::direct) {
    const Vector xhat = bregman_prox_point(problem, phi, x, lambda, options);
    return problem.F(xhat) + phi.bregman(xhat, x) / lambda;
  }
  // inf_y {F(y) + Φ(y)/λ − ⟨∇Φ(x), y⟩/λ} − Φ(x)/λ + ⟨∇Φ(x), x⟩/λ
  const Vector grad_x = phi.gradient(x);
  ConvexObjective obj;
  obj.value = [&](const Vector& y) {
    const double p = phi.value(y);
    if (!std::isfinite(p)) return kInf;
    return problem.f.value(y) + problem.r.penalty_value(y) + (p - grad_x.dot(y)) / lambda;
  };
  obj.subgradient = [&](const Vector& y) -> Vector {
    return problem.f.subgradient(y) + problem.r.subgradient(y) +
           (phi.gradient(y) - grad_x) / lambda;
  };
  if (problem.f.hessian && problem.r.penalty() != PenaltyKind::l1) {
    obj.hessian = [&](const Vector& y) -> Matrix {
      return problem.f.hessian(y) + *problem.r.hessian(y) + phi.hessian(y) / lambda;
    };
  }
  MinimizeOptions mo;
  mo.tol = std::max(options.tol * 1e-3, 1e-15);
  const MinimizeResult m =
      minimize_convex(obj, Region{phi.domain(), problem.r.constraint()}, x, mo);
  return m.value - phi.value(x) / lambda + grad_x.dot(x) / lambda;
}

Vector envelope_gradient(const EnvelopeProblem& problem, const LegendreFunction& phi,
                         const Vector& x, double lambda, const EnvelopeOptions& options) {
  const Vector xhat = bregman_prox_point(problem, phi, x, lambda, options);
  return phi.hessian_apply(x, x - xhat) / lambda;
}

EnvelopeReport stationarity(const EnvelopeProblem& problem, const LegendreFunction& phi,
                            const Vector& x, double lambda, const EnvelopeOptions& options) {
  EnvelopeReport rep;
  rep.prox_point = bregman_prox_point(problem, phi, x, lambda, options);
  rep.divergence = phi.bregman(rep.prox_point, x);
  rep.envelope_value_direct = problem.F(rep.prox_point) + rep.divergence / lambda;
  rep.envelope_value_conjugate =
      envelope_value(problem, phi, x, lambda, EnvelopePath::conjugate, options);
  const double scale = 1.0 + std::abs(rep.envelope_value_direct);
  if (std::abs(rep.envelope_value_direct - rep.envelope_value_conjugate) > 1e-6 * scale) {
    std::ostringstream msg;
    msg << "envelope paths disagree: direct " << rep.envelope_value_direct << " vs conjugate "
        << rep.envelope_value_conjugate;
    throw SolverError(msg.str());
  }
  rep.envelope_gradient = phi.hessian_apply(x, x - rep.prox_point) / lambda;
  rep.local_dual_norm_of_gradient = local_dual_norm(phi, x, rep.envelope_gradient);
  if (phi_unit_strongly_convex(phi, problem.r)) {
    rep.lower_bound_check = std::sqrt(rep.divergence) -
                            lambda / std::sqrt(2.0) * rep.local_dual_norm_of_gradient;
  }
  return rep;
}

StationaritySummary stationarity_summary(const EnvelopeProblem& problem,
                                         const LegendreFunction& phi, const Vector& x,
                                         double lambda, const EnvelopeOptions& options) {
  StationaritySummary s;
  const Vector xhat = bregman_prox_point(problem, phi, x, lambda, options);
  s.divergence = phi.bregman(xhat, x);
  const Vector grad = phi.hessian_apply(x, x - xhat) / lambda;
  if (grad.isZero(0.0)) {
    s.gradient_local_norm = 0.0;
  } else {
    s.gradient_local_norm = local_dual_norm(phi, x, grad);
  }
  return s;
}

}  // namespace bregopt
