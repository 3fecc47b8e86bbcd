#include "bregopt/driver.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace bregopt {

double resolve_lambda(const ProblemInstance& problem, const SolverConfig& config) {
  const auto& k = problem.constants();
  const double weak = problem.regime == Regime::C ? 0.0 : k.tau + k.rho;
  double lambda = 0.0;
  if (config.lambda) {
    lambda = *config.lambda;
  } else if (problem.lambda) {
    lambda = *problem.lambda;
  } else if (problem.regime == Regime::C || weak == 0.0) {
    lambda = 1.0;
  } else {
    lambda = 1.0 / (2.0 * weak);
  }
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ConfigError("lambda must be positive");
  if (lambda * weak >= 1.0) throw ConfigError("lambda must satisfy lambda * (tau + rho) < 1");
  return lambda;
}

double stepsize_constant(double lambda, double alpha, std::size_t T, Regime regime,
                         double smooth_M) {
  if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
  const double root = std::sqrt(static_cast<double>(T) + 1.0);
  switch (regime) {
    case Regime::A:
      if (!(lambda > 0.0)) throw ConfigError("lambda must be positive");
      return 1.0 / (1.0 / lambda + root / alpha);
    case Regime::B:
      if (!(lambda > 0.0)) throw ConfigError("lambda must be positive");
      if (!(smooth_M >= 0.0)) throw ConfigError("smoothness constant must be nonnegative");
      return 1.0 / (smooth_M + 1.0 / lambda + root / alpha);
    case Regime::C:
      return alpha / root;
  }
  return 0.0;
}

std::vector<double> make_schedule(const ProblemInstance& problem, const SolverConfig& config,
                                  double lambda) {
  const std::size_t n = config.horizon_T + 1;
  const auto& k = problem.constants();
  std::vector<double> etas;
  if (const auto* c = std::get_if<ConstantAlpha>(&config.schedule)) {
    etas.assign(n, stepsize_constant(lambda, c->alpha, config.horizon_T, problem.regime,
                                     k.smooth_M));
  } else if (const auto* s = std::get_if<StronglyConvexMu>(&config.schedule)) {
    if (!(s->mu > 0.0)) throw ConfigError("strongly convex schedule needs mu > 0");
    etas.resize(n);
    for (std::size_t t = 0; t < n; ++t) etas[t] = 1.0 / (s->mu * static_cast<double>(t + 1));
  } else {
    etas = std::get<ExplicitSchedule>(config.schedule).etas;
    if (etas.size() != n) throw ConfigError("explicit schedule must list T+1 step sizes");
  }
  for (std::size_t t = 0; t < n; ++t) {
    if (!(etas[t] > 0.0) || !std::isfinite(etas[t])) {
      throw ConfigError("step sizes must be positive and finite");
    }
    if (t > 0 && etas[t] > etas[t - 1]) throw ConfigError("step sizes must be nonincreasing");
  }
  if (problem.regime != Regime::C) {
    const double cap = problem.regime == Regime::B ? lambda / (1.0 + lambda * k.smooth_M) : lambda;
    if (!(etas.front() < cap)) throw ConfigError("step sizes exceed the admissible range");
    if (etas.front() * k.rho >= 1.0) throw ConfigError("step sizes must satisfy eta * rho < 1");
  }
  return etas;
}

std::vector<double> tstar_probabilities(const std::vector<double>& etas, double rho) {
  if (etas.empty()) throw ConfigError("no step sizes");
  std::vector<double> w(etas.size());
  double total = 0.0;
  for (std::size_t t = 0; t < etas.size(); ++t) {
    if (etas[t] * rho >= 1.0) throw ConfigError("t* weight overflow: eta * rho >= 1");
    w[t] = etas[t] / (1.0 - etas[t] * rho);
    total += w[t];
  }
  for (double& v : w) v /= total;
  return w;
}

std::size_t sample_tstar(const std::vector<double>& etas, double rho, Rng& rng) {
  const std::vector<double> p = tstar_probabilities(etas, rho);
  std::discrete_distribution<std::size_t> pick(p.begin(), p.end());
  return pick(rng);
}

namespace {

enum class StepKind { model, linear_gradient };

RunTrace run_loop(const ProblemInstance& problem, const SolverConfig& config, StepKind kind,
                  std::string algorithm) {
  const ModelOracle& oracle = *problem.oracle;
  if (!problem.phi.in_interior(problem.x0) || !std::isfinite(problem.regularizer.value(problem.x0))) {
    throw DomainError("x0 must lie in int(dom Φ) ∩ dom r");
  }
  RunTrace trace;
  trace.algorithm = std::move(algorithm);
  trace.lambda = resolve_lambda(problem, config);
  trace.etas = make_schedule(problem, config, trace.lambda);
  const double rho = problem.regime == Regime::C ? 0.0 : oracle.constants().rho;

  ProxOptions po;
  po.inner_tol = config.inner_tol;
  po.probes = config.three_point_probes;
  po.rho = rho;

  Rng rng = make_rng(config.seed);
  const std::size_t steps = config.horizon_T + 1;
  trace.iterates.reserve(steps + 1);
  trace.iterates.push_back(problem.x0);
  trace.sampled_xi_ids.reserve(steps);
  trace.diagnostics.reserve(steps);
  for (std::size_t t = 0; t < steps; ++t) {
    const Vector& x = trace.iterates.back();
    const Sample xi = oracle.sample(rng);
    StepModel model = oracle.step_model(x, xi);
    if (kind == StepKind::linear_gradient && !std::holds_alternative<LinearModel>(model)) {
      throw ConfigError("mirror descent needs an oracle with linear models");
    }
    const ProxStepResult res =
        prox_step(model, problem.regularizer, problem.phi, x, trace.etas[t], po);
    IterationDiagnostics diag;
    diag.model_value = model_value(model, res.minimizer);
    diag.r_value = problem.regularizer.value(res.minimizer);
    diag.step_divergence = problem.phi.bregman(res.minimizer, x);
    diag.three_point_residual = res.three_point_residual;
    diag.inner_iterations = res.inner_iterations;
    diag.method = res.method;
    trace.diagnostics.push_back(diag);
    trace.sampled_xi_ids.push_back(xi.index);
    trace.iterates.push_back(res.minimizer);
  }
  trace.t_star = sample_tstar(trace.etas, rho, rng);
  trace.returned_point = trace.iterates[trace.t_star];

  const Eigen::Index d = problem.x0.size();
  Vector wsum = Vector::Zero(d);
  Vector usum = Vector::Zero(d);
  double eta_total = 0.0;
  for (std::size_t t = 0; t < steps; ++t) {
    wsum += trace.etas[t] * trace.iterates[t];
    usum += trace.iterates[t];
    eta_total += trace.etas[t];
  }
  trace.weighted_average = wsum / eta_total;
  trace.uniform_average = usum / static_cast<double>(steps);
  trace.averaged_point = std::holds_alternative<StronglyConvexMu>(config.schedule)
                             ? trace.uniform_average
                             : trace.weighted_average;
  return trace;
}

}  // namespace

RunTrace run_model_based(const ProblemInstance& problem, const SolverConfig& config) {
  if (problem.regime != Regime::A) throw ConfigError("model-based loop expects a regime A problem");
  return run_loop(problem, config, StepKind::model, "model_based");
}

RunTrace run_mirror_descent_smooth(const ProblemInstance& problem, const SolverConfig& config) {
  if (problem.regime != Regime::B) throw ConfigError("smooth mirror descent expects regime B");
  return run_loop(problem, config, StepKind::linear_gradient, "mirror_descent_smooth");
}

RunTrace run_convex(const ProblemInstance& problem, const SolverConfig& config, bool average) {
  if (problem.regime != Regime::C) throw ConfigError("convex loop expects a regime C problem");
  RunTrace trace = run_loop(problem, config, StepKind::model, "convex");
  if (!average) trace.averaged_point = trace.returned_point;
  return trace;
}

RunTrace run(const ProblemInstance& problem, const SolverConfig& config) {
  switch (problem.regime) {
    case Regime::A: return run_model_based(problem, config);
    case Regime::B: return run_mirror_descent_smooth(problem, config);
    case Regime::C: return run_convex(problem, config);
  }
  throw ConfigError("unknown regime");
}

double convex_rate_bound(const ProblemInstance& problem, const std::vector<double>& etas) {
  if (!problem.optimum) throw ConfigError("rate bound needs a known minimizer");
  const double big_l = problem.constants().lip_bound;
  double num = problem.phi.bregman(problem.optimum->x_star, problem.x0);
  double den = 0.0;
  for (double eta : etas) {
    num += (eta * big_l) * (eta * big_l) / 4.0;
    den += eta;
  }
  num += etas.front() * (problem.regularizer.value(problem.x0) -
                         problem.regularizer.infimum(problem.dimension()));
  return num / den;
}

double strongly_convex_rate_bound(const ProblemInstance& problem, std::size_t T, double mu) {
  if (!problem.optimum) throw ConfigError("rate bound needs a known minimizer");
  if (!(mu > 0.0)) throw ConfigError("strongly convex bound needs mu > 0");
  const double big_l = problem.constants().lip_bound;
  const double t1 = static_cast<double>(T) + 1.0;
  const double num = big_l * big_l * (1.0 + std::log(t1)) / (4.0 * mu) +
                     problem.regularizer.value(problem.x0) -
                     problem.regularizer.infimum(problem.dimension()) +
                     mu * problem.phi.bregman(problem.optimum->x_star, problem.x0);
  return num / t1;
}

TelescopeCheck telescoping_bound(const std::vector<double>& a, const std::vector<double>& b) {
  if (b.size() != a.size() + 1) throw ConfigError("telescoping check needs |b| = |a| + 1");
  TelescopeCheck c;
  for (std::size_t t = 0; t < a.size(); ++t) c.lhs += a[t] * (b[t] - b[t + 1]);
  c.rhs = a.front() * (b.front() - *std::min_element(b.begin(), b.end()));
  return c;
}

// ---------------------------------------------------------------- sweeps

std::vector<std::pair<std::string, double>> run_metrics(const ProblemInstance& problem,
                                                        const RunTrace& trace, bool full_tstar,
                                                        double inner_tol) {
  if (problem.regime == Regime::C) {
    if (!problem.optimum) throw ConfigError("objective gap needs F*");
    return {{"objective_gap", problem.F(trace.averaged_point) - problem.optimum->F_star}};
  }
  const EnvelopeProblem ep = EnvelopeProblem::from(problem);
  EnvelopeOptions eo;
  eo.tol = inner_tol;
  eo.probes = 4;
  if (!full_tstar) {
    const auto s = stationarity_summary(ep, problem.phi, trace.returned_point, trace.lambda, eo);
    return {{"breg_div_to_prox", s.divergence}, {"env_grad_local_norm", s.gradient_local_norm}};
  }
  const double rho = problem.constants().rho;
  const std::vector<double> p = tstar_probabilities(trace.etas, rho);
  double div = 0.0;
  double grad = 0.0;
  for (std::size_t t = 0; t < p.size(); ++t) {
    const auto s = stationarity_summary(ep, problem.phi, trace.iterates[t], trace.lambda, eo);
    div += p[t] * s.divergence;
    grad += p[t] * s.gradient_local_norm;
  }
  return {{"breg_div_to_prox", div}, {"env_grad_local_norm", grad}};
}

SlopeFit fit_loglog(const std::vector<std::size_t>& horizons, const std::vector<double>& means) {
  if (horizons.size() != means.size() || horizons.size() < 2) {
    throw ConfigError("slope fit needs at least two horizons");
  }
  SlopeFit fit;
  fit.horizons = horizons;
  fit.means = means;
  if (std::any_of(means.begin(), means.end(), [](double m) { return !(m > 0.0); })) {
    fit.converged = true;
    fit.slope = std::nan("");
    fit.intercept = std::nan("");
    fit.r2 = std::nan("");
    return fit;
  }
  const double n = static_cast<double>(means.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < means.size(); ++i) {
    const double x = std::log(static_cast<double>(horizons[i]));
    const double y = std::log(means[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  const double cxx = sxx - sx * sx / n;
  const double cxy = sxy - sx * sy / n;
  const double cyy = syy - sy * sy / n;
  if (!(cxx > 0.0)) throw ConfigError("slope fit needs distinct horizons");
  fit.slope = cxy / cxx;
  fit.intercept = (sy - fit.slope * sx) / n;
  fit.r2 = cyy > 0.0 ? (cxy * cxy) / (cxx * cyy) : 1.0;
  return fit;
}

SweepResult sweep(const ProblemInstance& problem, const SweepOptions& options) {
  if (options.horizons.empty()) throw ConfigError("sweep needs horizons");
  if (!std::is_sorted(options.horizons.begin(), options.horizons.end()) ||
      std::adjacent_find(options.horizons.begin(), options.horizons.end()) !=
          options.horizons.end()) {
    throw ConfigError("horizons must be strictly increasing");
  }
  if (options.n_seeds == 0) throw ConfigError("sweep needs at least one seed");
  const std::size_t n_cells = options.horizons.size() * options.n_seeds;

  struct Cell {
    std::vector<SweepRow> rows;
  };
  std::vector<Cell> cells(n_cells);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&]() {
    for (;;) {
      const std::size_t c = next.fetch_add(1);
      if (c >= n_cells) return;
      try {
        const std::size_t ti = c / options.n_seeds;
        const std::size_t si = c % options.n_seeds;
        SolverConfig cfg = options.config;
        cfg.horizon_T = options.horizons[ti];
        cfg.seed = options.base_seed + si;
        const auto start = std::chrono::steady_clock::now();
        const RunTrace trace = run(problem, cfg);
        const auto metrics = run_metrics(problem, trace, options.full_tstar, cfg.inner_tol);
        const double ms = std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - start)
                              .count();
        for (const auto& [name, value] : metrics) {
          cells[c].rows.push_back(SweepRow{std::string(to_string(problem.regime)), problem.id,
                                           cfg.horizon_T, cfg.seed, trace.etas.front(),
                                           trace.lambda, name, value, ms});
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(n_cells);
        return;
      }
    }
  };

  const unsigned n_threads =
      std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(n_cells)));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  SweepResult result;
  for (auto& cell : cells) {
    for (auto& row : cell.rows) result.rows.push_back(std::move(row));
  }
  result.primary_metric = problem.regime == Regime::C ? "objective_gap" : "breg_div_to_prox";

  std::vector<double> means;
  std::vector<double> ses;
  for (std::size_t ti = 0; ti < options.horizons.size(); ++ti) {
    std::vector<double> vals;
    for (const auto& row : result.rows) {
      if (row.T == options.horizons[ti] && row.metric_name == result.primary_metric) {
        vals.push_back(row.metric_value);
      }
    }
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= static_cast<double>(vals.size());
    double ss = 0.0;
    for (double v : vals) ss += (v - mean) * (v - mean);
    const double n = static_cast<double>(vals.size());
    means.push_back(mean);
    ses.push_back(vals.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0);
  }
  if (options.horizons.size() >= 2) {
    result.fit = fit_loglog(options.horizons, means);
  } else {
    result.fit.horizons = options.horizons;
    result.fit.means = means;
    result.fit.slope = std::nan("");
  }
  result.fit.n_seeds = options.n_seeds;
  result.fit.std_errors = ses;
  return result;
}

}  // namespace bregopt
