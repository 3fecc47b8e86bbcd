#include "bregopt/problems.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>

namespace bregopt {

namespace {

constexpr std::size_t kAtoms = 20;

std::vector<double> uniform_weights(std::size_t m) {
  return std::vector<double>(m, 1.0 / static_cast<double>(m));
}

Matrix gaussian_rows(Rng& rng, std::size_t m, std::size_t d, double scale) {
  std::normal_distribution<double> normal(0.0, scale);
  Matrix rows(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    for (Eigen::Index j = 0; j < rows.cols(); ++j) rows(i, j) = normal(rng);
  }
  return rows;
}

double rms(const std::vector<double>& weights, const std::vector<double>& values) {
  double acc = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) acc += weights[i] * values[i] * values[i];
  return std::sqrt(acc);
}

// Robust phase retrieval |⟨a,x⟩² − b| with a ~ N(0, I/2).
ProblemInstance robust_phase_retrieval(const std::string& id, std::size_t d, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  CompositeData data;
  data.rows = gaussian_rows(rng, kAtoms, d, std::sqrt(0.5));
  Vector x_true(static_cast<Eigen::Index>(d));
  if (d == 1) x_true << 1.0; else x_true << 0.6, -0.3;
  // The 1-D instance is noise free: F(x) = E[a²]·|x² − 1|, minimized at x = ±1.
  std::normal_distribution<double> noise(0.0, d == 1 ? 0.0 : 0.1);
  data.targets.resize(static_cast<Eigen::Index>(kAtoms));
  for (std::size_t i = 0; i < kAtoms; ++i) {
    const double ax = data.rows.row(static_cast<Eigen::Index>(i)).dot(x_true);
    data.targets[static_cast<Eigen::Index>(i)] = ax * ax + (d == 1 ? 0.0 : noise(rng));
  }
  data.weights = uniform_weights(kAtoms);

  ModelConstants k;
  k.tau = data.accuracy_tau();
  std::vector<double> lips(kAtoms);
  for (std::size_t i = 0; i < kAtoms; ++i) lips[i] = std::sqrt(2.0) * data.jacobian_constant(i);
  k.lip_bound = rms(data.weights, lips);

  ProblemInstance p;
  p.id = id;
  p.description = "robust phase retrieval |<a,x>^2 - b| with Gauss-Newton models";
  p.oracle = std::make_shared<ProxLinearOracle>(std::move(data), k);
  p.regularizer = Regularizer::zero();
  p.phi = build_composite_legendre(CompositeData::accuracy_polynomial(),
                                   CompositeData::growth_polynomial());
  p.regime = Regime::A;
  p.x0 = Vector(static_cast<Eigen::Index>(d));
  if (d == 1) p.x0 << 0.2; else p.x0 << 0.45, -0.1;
  p.alpha = 1.0;
  p.points = default_points(p.regularizer, p.phi, d);
  return p;
}

ProblemInstance noisy_quartic() {
  Rng rng = make_rng(201);
  const std::size_t d = 2;
  SmoothComponents data;
  data.kind = ComponentKind::quartic_residual;
  data.rows = gaussian_rows(rng, kAtoms, d, 0.3);
  Vector x_true(2);
  x_true << 1.0, 1.0;
  std::normal_distribution<double> noise(0.0, 0.05);
  data.targets.resize(static_cast<Eigen::Index>(kAtoms));
  for (std::size_t i = 0; i < kAtoms; ++i) {
    const double ax = data.rows.row(static_cast<Eigen::Index>(i)).dot(x_true);
    data.targets[static_cast<Eigen::Index>(i)] = ax * ax + std::abs(noise(rng));
  }
  data.weights = uniform_weights(kAtoms);

  // ∇²f_i = 4(3⟨a,x⟩² − b)aaᵀ against ∇²Φ ⪰ (1 + ‖x‖²)I for Φ = ½‖x‖² + ¼‖x‖⁴.
  ModelConstants k;
  for (std::size_t i = 0; i < kAtoms; ++i) {
    const double a2 = data.rows.row(static_cast<Eigen::Index>(i)).squaredNorm();
    k.smooth_M += data.weights[i] * 12.0 * a2 * a2;
    k.tau += data.weights[i] * 4.0 * data.targets[static_cast<Eigen::Index>(i)] * a2;
  }
  k.variance_sigma = 0.5;
  const double noise_scale = k.variance_sigma / std::sqrt(2.0 * static_cast<double>(d));

  ProblemInstance p;
  p.id = "P2";
  p.description = "smooth quartic E(<a,x>^2 - b)^2 with Gaussian gradient noise";
  p.oracle = std::make_shared<LinearMirrorOracle>(std::move(data), GradientMode::exact_plus_noise,
                                                  noise_scale, Regime::B, k,
                                                  std::vector<double>(kAtoms, 0.0));
  p.regularizer = Regularizer::zero();
  p.phi = LegendreFunction::norm_power_sum({1.0, 0.0, 1.0});
  p.regime = Regime::B;
  p.x0 = Vector(2);
  p.x0 << -1.0, 2.0;
  p.alpha = 1.0;
  p.points = default_points(p.regularizer, p.phi, d);
  return p;
}

SmoothComponents simplex_costs() {
  Rng rng = make_rng(301);
  const std::size_t d = 10;
  SmoothComponents data;
  data.kind = ComponentKind::linear;
  data.rows.resize(static_cast<Eigen::Index>(kAtoms), static_cast<Eigen::Index>(d));
  std::uniform_real_distribution<double> jitter(-0.5, 0.5);
  for (Eigen::Index i = 0; i < data.rows.rows(); ++i) {
    for (Eigen::Index j = 0; j < data.rows.cols(); ++j) {
      data.rows(i, j) = 0.1 * static_cast<double>(j) + jitter(rng);
    }
  }
  data.targets = Vector::Zero(static_cast<Eigen::Index>(kAtoms));
  data.weights = uniform_weights(kAtoms);
  return data;
}

ProblemInstance simplex_linear(bool strongly_convex) {
  SmoothComponents data = simplex_costs();
  const std::size_t d = static_cast<std::size_t>(data.rows.cols());
  const Vector mean_cost = data.rows.transpose() * Eigen::Map<const Vector>(
                               data.weights.data(), static_cast<Eigen::Index>(kAtoms));
  std::vector<double> lips(kAtoms);
  for (std::size_t i = 0; i < kAtoms; ++i) {
    lips[i] = std::sqrt(2.0) * data.rows.row(static_cast<Eigen::Index>(i)).cwiseAbs().maxCoeff();
  }
  ModelConstants k;
  k.lip_bound = rms(data.weights, lips);
  const double mu = 0.2;
  if (strongly_convex) k.mu = mu;

  ProblemInstance p;
  p.oracle = std::make_shared<LinearMirrorOracle>(std::move(data), GradientMode::component, 0.0,
                                                  Regime::C, k, lips);
  p.phi = LegendreFunction::shannon_entropy();
  p.regime = Regime::C;
  p.x0 = Vector::Constant(static_cast<Eigen::Index>(d), 1.0 / static_cast<double>(d));
  p.alpha = 1.0;
  Optimum opt;
  if (!strongly_convex) {
    p.id = "P3";
    p.description = "linear costs on the simplex with entropy geometry";
    p.regularizer = Regularizer::indicator_simplex();
    Eigen::Index j = 0;
    opt.F_star = mean_cost.minCoeff(&j);
    opt.x_star = Vector::Zero(static_cast<Eigen::Index>(d));
    opt.x_star[j] = 1.0;
  } else {
    p.id = "P4";
    p.description = "linear costs on the simplex plus mu times entropy";
    p.regularizer = Regularizer::entropy_like(mu, LegendreFunction::shannon_entropy())
                        .with_constraint(Constraint{ConstraintKind::simplex, 1.0});
    // Gibbs distribution: x* ∝ exp(−c̄/μ), F* = −μ log Σ exp(−c̄/μ).
    const Vector logits = -mean_cost / mu;
    const double top = logits.maxCoeff();
    const double lse = top + std::log((logits.array() - top).exp().sum());
    opt.F_star = -mu * lse;
    opt.x_star = (logits.array() - lse).exp().matrix();
  }
  p.points = default_points(p.regularizer, p.phi, d);
  p.optimum = opt;
  return p;
}

ProblemInstance saddle_ball() {
  Rng rng = make_rng(501);
  const std::size_t d = 2;
  SaddleData data;
  data.rows = gaussian_rows(rng, kAtoms, d, 0.5);
  Vector shift(2);
  shift << 0.6, -0.3;
  data.rows.rowwise() += shift.transpose();
  data.weights = uniform_weights(kAtoms);
  data.set.kind = UncertaintySet::Kind::ball;
  data.set.radius = 0.1;

  std::vector<double> lips(kAtoms);
  for (std::size_t i = 0; i < kAtoms; ++i) {
    lips[i] = std::sqrt(2.0) * (data.rows.row(static_cast<Eigen::Index>(i)).norm() + data.set.radius);
  }
  ModelConstants k;
  k.lip_bound = rms(data.weights, lips);
  const Vector mean_row = data.rows.colwise().mean().transpose();
  const double radius = data.set.radius;

  ProblemInstance p;
  p.id = "P5";
  p.description = "saddle problem <a + w, x> with w in a ball of radius 0.1, x in the unit ball";
  p.oracle = std::make_shared<SaddleOracle>(std::move(data), k, lips);
  p.regularizer = Regularizer::indicator_ball(1.0);
  p.phi = LegendreFunction::euclidean();
  p.regime = Regime::A;
  p.x0 = Vector(2);
  p.x0 << 0.2, 0.2;
  p.alpha = 1.0;
  p.lambda = 1.0;
  // F(x) = ⟨ā, x⟩ + radius·‖x‖ on the unit ball.
  Optimum opt;
  opt.x_star = -mean_row / mean_row.norm();
  opt.F_star = -mean_row.norm() + radius;
  p.optimum = opt;
  p.points = default_points(p.regularizer, p.phi, d);
  return p;
}

ProblemInstance least_squares_ball() {
  Rng rng = make_rng(601);
  const std::size_t d = 2;
  Matrix rows = gaussian_rows(rng, kAtoms, d, 1.0);
  Vector x_true(2);
  x_true << 1.5, -1.0;
  std::normal_distribution<double> noise(0.0, 0.3);
  Vector targets(static_cast<Eigen::Index>(kAtoms));
  for (Eigen::Index i = 0; i < targets.size(); ++i) targets[i] = rows.row(i).dot(x_true) + noise(rng);
  const double radius = 1.0;
  std::vector<double> weights = uniform_weights(kAtoms);
  std::vector<double> lips(kAtoms);
  for (std::size_t i = 0; i < kAtoms; ++i) {
    const double an = rows.row(static_cast<Eigen::Index>(i)).norm();
    lips[i] = std::sqrt(2.0) * an * (an * radius + std::abs(targets[static_cast<Eigen::Index>(i)]));
  }
  ModelConstants k;
  k.lip_bound = rms(weights, lips);

  ProblemInstance p;
  p.id = "P6";
  p.description = "least squares on the unit ball with full proximal-point models";
  p.oracle = std::make_shared<ProximalPointOracle>(rows, targets, weights, k, lips);
  p.regularizer = Regularizer::indicator_ball(radius);
  p.phi = LegendreFunction::euclidean();
  p.regime = Regime::C;
  p.x0 = Vector::Zero(2);
  p.alpha = 0.5;
  p.points = default_points(p.regularizer, p.phi, d);
  const MinimizeResult m =
      minimize_convex(p.oracle->f_objective(),
                      Region{DomainKind::all_space, p.regularizer.constraint()}, p.x0);
  p.optimum = Optimum{m.value, m.argmin};
  return p;
}

}  // namespace

PointSampler default_points(const Regularizer& r, const LegendreFunction& phi, std::size_t dim) {
  const Constraint& c = r.constraint();
  if (c.kind == ConstraintKind::simplex) return simplex_sampler(dim);
  const double radius = c.kind == ConstraintKind::ball ? c.radius : 3.0;
  if (phi.domain() != DomainKind::all_space) return positive_ball_sampler(dim, radius);
  return ball_sampler(dim, radius);
}

std::vector<std::string> problem_ids() { return {"P1", "P1_1d", "P2", "P3", "P4", "P5", "P6"}; }

ProblemInstance make_problem(const std::string& id) {
  if (id == "P1") return robust_phase_retrieval("P1", 2, 101);
  if (id == "P1_1d") return robust_phase_retrieval("P1_1d", 1, 102);
  if (id == "P2") return noisy_quartic();
  if (id == "P3") return simplex_linear(false);
  if (id == "P4") return simplex_linear(true);
  if (id == "P5") return saddle_ball();
  if (id == "P6") return least_squares_ball();
  throw ConfigError("unknown problem id: " + id);
}

std::vector<ProblemInstance> registry() {
  std::vector<ProblemInstance> out;
  for (const auto& id : problem_ids()) out.push_back(make_problem(id));
  return out;
}

std::string to_string(OracleMethod method) {
  switch (method) {
    case OracleMethod::grid: return "grid";
    case OracleMethod::golden_section: return "golden_section";
    case OracleMethod::projected_descent_long: return "projected_descent_long";
  }
  return "unknown";
}

double golden_section(const std::function<double(double)>& f, double lo, double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
    if (c >= d) break;
  }
  return 0.5 * (a + b);
}

Box default_box(const ProblemInstance& problem) {
  const auto n = static_cast<Eigen::Index>(problem.dimension());
  const Constraint& c = problem.regularizer.constraint();
  if (c.kind == ConstraintKind::simplex) return Box{Vector::Zero(n), Vector::Ones(n)};
  if (c.kind == ConstraintKind::ball) {
    return Box{Vector::Constant(n, -c.radius), Vector::Constant(n, c.radius)};
  }
  const double half = 2.0 * (1.0 + problem.x0.cwiseAbs().maxCoeff());
  return Box{Vector::Constant(n, -half), Vector::Constant(n, half)};
}

namespace {

// Scan [lo, hi] on a grid of the given step, then golden-section refine around the best cell.
std::pair<double, double> scan_then_golden(const std::function<double(double)>& f, double lo,
                                           double hi, double step) {
  const auto n = static_cast<long>(std::ceil((hi - lo) / step));
  double best_u = lo;
  double best_f = kInf;
  for (long k = 0; k <= n; ++k) {
    const double u = std::min(hi, lo + static_cast<double>(k) * step);
    const double v = f(u);
    if (v < best_f) {
      best_f = v;
      best_u = u;
    }
  }
  const double a = std::max(lo, best_u - step);
  const double b = std::min(hi, best_u + step);
  const double u = golden_section(f, a, b, 1e-12 * (1.0 + std::abs(best_u)));
  const double fu = f(u);
  if (fu < best_f) return {u, fu};
  return {best_u, best_f};
}

}  // namespace

OracleResult grid_min(const std::function<double(const Vector&)>& F, const Box& box,
                      double resolution) {
  if (box.lower.size() != 2 || box.upper.size() != 2) throw ConfigError("grid oracle is 2-D");
  if (!(resolution > 0.0)) throw ConfigError("resolution must be positive");
  const double width = (box.upper - box.lower).maxCoeff();
  if (!(width > 0.0)) throw ConfigError("empty search box");
  if (resolution >= width) throw ConfigError("resolution too coarse for the search box");
  const double cells = std::ceil(width / resolution) + 1.0;
  if (cells * cells > 2.5e7) throw ConfigError("grid resolution too fine for the oracle");
  Vector lo = box.lower;
  Vector hi = box.upper;
  double step = resolution;
  Vector best = lo;
  double best_f = kInf;
  for (int round = 0; round < 7; ++round) {
    const auto nx = static_cast<long>(std::ceil((hi[0] - lo[0]) / step));
    const auto ny = static_cast<long>(std::ceil((hi[1] - lo[1]) / step));
    Vector x(2);
    for (long i = 0; i <= nx; ++i) {
      x[0] = std::min(hi[0], lo[0] + static_cast<double>(i) * step);
      for (long j = 0; j <= ny; ++j) {
        x[1] = std::min(hi[1], lo[1] + static_cast<double>(j) * step);
        const double v = F(x);
        if (v < best_f) {
          best_f = v;
          best = x;
        }
      }
    }
    // Zoom: ±2 cells around the incumbent at a ten times finer step.
    lo = (best.array() - 2.0 * step).max(box.lower.array()).matrix();
    hi = (best.array() + 2.0 * step).min(box.upper.array()).matrix();
    step /= 10.0;
  }
  OracleResult res;
  res.value = best_f;
  res.argmin = best;
  res.method = OracleMethod::grid;
  res.resolution = resolution;
  return res;
}

OracleResult brute_force_min(const ProblemInstance& problem, const Box& box, double resolution) {
  const std::size_t d = problem.dimension();
  if (!(resolution > 0.0)) throw ConfigError("resolution must be positive");
  const double width = (box.upper - box.lower).maxCoeff();
  if (!(width > 0.0)) throw ConfigError("empty search box");
  if (resolution >= width) throw ConfigError("resolution too coarse for the search box");
  auto F = [&](const Vector& x) { return problem.F(x); };
  const ConstraintKind ck = problem.regularizer.constraint().kind;

  OracleResult res;
  res.resolution = resolution;
  if (ck == ConstraintKind::simplex && d == 2) {
    auto f1 = [&](double u) { return F((Vector(2) << u, 1.0 - u).finished()); };
    const auto [u, v] = scan_then_golden(f1, 0.0, 1.0, resolution);
    res.value = v;
    res.argmin = (Vector(2) << u, 1.0 - u).finished();
    res.method = OracleMethod::golden_section;
    return res;
  }
  if (d == 1) {
    auto f1 = [&](double u) { return F(Vector::Constant(1, u)); };
    const auto [u, v] = scan_then_golden(f1, box.lower[0], box.upper[0], resolution);
    res.value = v;
    res.argmin = Vector::Constant(1, u);
    res.method = OracleMethod::golden_section;
    return res;
  }
  if (d == 2 && ck != ConstraintKind::simplex) {
    OracleResult g = grid_min(F, box, resolution);
    if (problem.F(problem.x0) < g.value) {
      g.value = problem.F(problem.x0);
      g.argmin = problem.x0;
    }
    if (ck == ConstraintKind::ball) {
      // Grid points only approach the circle; scan it by angle as well.
      const double rad = problem.regularizer.constraint().radius;
      auto on_circle = [&](double th) {
        return (Vector(2) << rad * std::cos(th), rad * std::sin(th)).finished();
      };
      const auto [th, v] =
          scan_then_golden([&](double t) { return F(on_circle(t)); }, 0.0, 2.0 * std::numbers::pi,
                           resolution / rad);
      if (v < g.value) {
        g.value = v;
        g.argmin = on_circle(th);
      }
    }
    return g;
  }

  // Long projected subgradient descent with diminishing normalized steps.
  const Constraint& c = problem.regularizer.constraint();
  auto project = [&](const Vector& y) -> Vector {
    switch (c.kind) {
      case ConstraintKind::simplex: return project_simplex(y);
      case ConstraintKind::ball: return c.pull_inside(y);
      case ConstraintKind::none: return y;
    }
    return y;
  };
  const bool positive = problem.phi.domain() != DomainKind::all_space ||
                        problem.regularizer.penalty() == PenaltyKind::entropy_like;
  Vector x = problem.x0;
  Vector best = x;
  double best_f = F(x);
  const double scale = 0.5 * width;
  constexpr long kIterations = 1000000;
  for (long k = 0; k < kIterations; ++k) {
    Vector g = problem.oracle->f_subgradient(x);
    if (problem.regularizer.penalty() != PenaltyKind::zero) g += problem.regularizer.subgradient(x);
    const double gn = g.norm();
    if (gn == 0.0) break;
    x = project(x - (scale / std::sqrt(static_cast<double>(k) + 1.0)) * (g / gn));
    if (positive) {
      x = x.cwiseMax(1e-300);
      if (c.kind == ConstraintKind::simplex) x /= x.sum();
    }
    const double v = F(x);
    if (v < best_f) {
      best_f = v;
      best = x;
    }
  }
  res.value = best_f;
  res.argmin = best;
  res.method = OracleMethod::projected_descent_long;
  return res;
}

}  // namespace bregopt

namespace bregopt {

SolverConfig default_config(const ProblemInstance& problem) {
  SolverConfig c;
  const double mu = problem.constants().mu;
  if (problem.regime == Regime::C && mu > 0.0) {
    c.schedule = StronglyConvexMu{mu};
  } else {
    c.schedule = ConstantAlpha{problem.alpha};
  }
  return c;
}

bool all_pass(const std::vector<CheckResult>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

namespace {

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

// Σ over poly_growth parts of w·(p(‖x‖) + p(‖y‖))/2·‖x − y‖².
double poly_lower_bound(const LegendreFunction& phi, const Vector& x, const Vector& y) {
  if (phi.kind() == LegendreKind::poly_growth) {
    auto p = [&](double u) {
      double acc = 0.0;
      double power = 1.0;
      for (double a : phi.coeffs()) {
        acc += a * power;
        power *= u;
      }
      return acc;
    };
    return 0.5 * (p(x.norm()) + p(y.norm())) * (x - y).squaredNorm();
  }
  if (phi.kind() == LegendreKind::weighted_sum) {
    double acc = 0.0;
    for (std::size_t j = 0; j < phi.children().size(); ++j) {
      acc += phi.weights()[j] * poly_lower_bound(phi.children()[j], x, y);
    }
    return acc;
  }
  return 0.0;
}

}  // namespace

std::vector<CheckResult> validate(const ProblemInstance& problem, const ValidationOptions& options) {
  std::vector<CheckResult> out;
  const ModelOracle& oracle = *problem.oracle;
  const LegendreFunction& phi = problem.phi;
  const ModelConstants& k = oracle.constants();
  Rng rng = make_rng(options.seed);

  {
    const bool ok = phi.in_interior(problem.x0) && std::isfinite(problem.regularizer.value(problem.x0));
    out.push_back({"x0_feasible", ok, ok ? "x0 in int(dom phi) and dom r" : "x0 infeasible"});
  }

  {
    // Divergence nonnegativity, claimed strong convexity and the polynomial-growth lower bound.
    double worst_nonneg = kInf;
    double worst_sc = kInf;
    double worst_poly = kInf;
    const auto sc = phi.strong_convexity();
    const bool sc_applies =
        sc && (!sc->simplex_only || problem.regularizer.constraint().kind == ConstraintKind::simplex);
    for (std::size_t n = 0; n < options.n_pairs; ++n) {
      const Vector x = problem.points(rng);
      const Vector y = problem.points(rng);
      if (!phi.in_interior(x)) continue;
      const double d = phi.bregman(y, x);
      const double scale = 1.0 + std::abs(phi.value(y)) + std::abs(phi.value(x));
      worst_nonneg = std::min(worst_nonneg, d / scale);
      if (sc_applies) {
        const double nrm = norm_of(y - x, sc->norm);
        worst_sc = std::min(worst_sc, (d - 0.5 * sc->modulus * nrm * nrm) / scale);
      }
      const double lb = poly_lower_bound(phi, x, y);
      if (lb > 0.0) worst_poly = std::min(worst_poly, (d - lb) / std::max(scale, lb));
    }
    out.push_back({"bregman_nonnegative", worst_nonneg >= -1e-12,
                   "min relative divergence " + fmt(worst_nonneg)});
    if (sc_applies) {
      out.push_back({"phi_strong_convexity", worst_sc >= -1e-9,
                     "min relative slack " + fmt(worst_sc)});
    }
    if (std::isfinite(worst_poly)) {
      out.push_back({"poly_growth_lower_bound", worst_poly >= -1e-9,
                     "min relative slack " + fmt(worst_poly)});
    }
  }

  {
    const std::size_t pairs = std::max<std::size_t>(1, options.n_pairs / 10);
    const std::size_t draws = oracle.noise_scale() > 0.0 ? options.n_samples : 0;
    bool ok = true;
    double worst = -kInf;
    for (std::size_t n = 0; n < pairs; ++n) {
      const Vector x = problem.points(rng);
      const Vector y = problem.points(rng);
      if (!phi.in_interior(x)) continue;
      const OneSidedReport r = verify_one_sided(oracle, phi, x, y, draws, rng);
      ok = ok && r.pass;
      worst = std::max(worst, r.mean_overshoot - 3.0 * r.standard_error);
    }
    out.push_back({"one_sided_accuracy", ok, "tau " + fmt(k.tau) + ", worst overshoot " + fmt(worst)});
  }

  if (problem.regime != Regime::B) {
    const LipschitzReport r = verify_lipschitz(oracle, phi, problem.points, options.n_pairs, rng);
    out.push_back({"model_lipschitz", r.pass,
                   "max ratio " + fmt(r.max_ratio) + ", rms L " + fmt(r.rms_L) + " <= " +
                       fmt(r.claimed_L)});
  } else {
    const SmoothnessReport s =
        verify_relative_smoothness(oracle, phi, problem.points, options.n_pairs, rng);
    out.push_back({"relative_smoothness", s.pass,
                   "M " + fmt(k.smooth_M) + ", tau " + fmt(k.tau) + ", worst lower " +
                       fmt(s.worst_lower) + ", worst upper " + fmt(s.worst_upper)});
    bool ok = true;
    double worst = 0.0;
    for (int n = 0; n < 5; ++n) {
      const Vector x = problem.points(rng);
      const VarianceReport v = verify_variance(oracle, phi, x, options.n_samples, rng);
      ok = ok && v.pass;
      worst = std::max(worst, v.mean_square / std::max(v.bound, 1e-300));
    }
    out.push_back({"gradient_variance", ok,
                   "sigma " + fmt(k.variance_sigma) + ", worst ratio to sigma^2/2 " + fmt(worst)});
  }

  if (oracle.f_smooth()) {
    const double rho = problem.regime == Regime::B ? k.tau + k.rho
                       : problem.regime == Regime::A ? k.rho
                                                     : 0.0;
    const CurvatureReport c = verify_second_order_weak_convexity(oracle, phi, rho, problem.points,
                                                                 options.n_pairs, rng);
    out.push_back({"second_order_weak_convexity", c.pass,
                   "rho " + fmt(rho) + ", worst eigenvalue " + fmt(c.worst_eigenvalue)});
  }

  {
    const ConvexityReport c =
        verify_model_convexity(oracle, problem.points, std::max<std::size_t>(1, options.n_pairs / 10), rng);
    out.push_back({"model_convexity", c.pass, "worst violation " + fmt(c.worst_violation)});
  }

  if (const auto* saddle = dynamic_cast<const SaddleOracle*>(&oracle)) {
    const ConvexityReport c = verify_saddle_argmax(*saddle, problem.points, options.n_pairs, rng);
    out.push_back({"saddle_argmax", c.pass, "worst violation " + fmt(c.worst_violation)});
  }

  if (k.mu > 0.0) {
    const double mu = problem.regularizer.mu_relative(phi);
    out.push_back({"relative_strong_convexity", mu >= k.mu,
                   "r - mu*phi convex for mu " + fmt(mu) + " >= " + fmt(k.mu)});
  }

  if (problem.optimum) {
    const Optimum& opt = *problem.optimum;
    const double f_star = problem.F(opt.x_star);
    bool ok = std::abs(f_star - opt.F_star) <= 1e-9 * (1.0 + std::abs(opt.F_star));
    double worst = kInf;
    for (std::size_t n = 0; n < options.n_pairs; ++n) {
      const double v = problem.F(problem.points(rng)) - opt.F_star;
      worst = std::min(worst, v);
    }
    ok = ok && worst >= -1e-9 * (1.0 + std::abs(opt.F_star));
    out.push_back({"optimum_consistent", ok,
                   "F(x*) " + fmt(f_star) + " vs F* " + fmt(opt.F_star) + ", min sampled gap " +
                       fmt(worst)});
  }
  return out;
}

}  // namespace bregopt
