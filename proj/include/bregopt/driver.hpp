#pragma once

#include "bregopt/envelope.hpp"
#include "bregopt/problem_instance.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace bregopt {

struct ConstantAlpha {
  double alpha = 1.0;
};
struct StronglyConvexMu {
  double mu = 1.0;
};
struct ExplicitSchedule {
  std::vector<double> etas;
};
using Schedule = std::variant<ConstantAlpha, StronglyConvexMu, ExplicitSchedule>;

struct SolverConfig {
  std::optional<double> lambda;  // defaults per regime when absent
  Schedule schedule = ConstantAlpha{};
  std::size_t horizon_T = 100;
  std::uint64_t seed = 1;
  double inner_tol = 1e-10;
  int three_point_probes = 8;
};

struct IterationDiagnostics {
  double model_value = 0.0;       // f_{x_t}(x_{t+1}, ξ_t)
  double r_value = 0.0;           // r(x_{t+1})
  double step_divergence = 0.0;   // D_Φ(x_{t+1}, x_t)
  double three_point_residual = 0.0;
  int inner_iterations = 0;
  MinimizeMethod method = MinimizeMethod::closed_form;
};

struct RunTrace {
  std::string algorithm;
  double lambda = 0.0;
  std::vector<Vector> iterates;  // x_0 .. x_{T+1}
  std::vector<double> etas;      // η_0 .. η_T
  std::vector<std::size_t> sampled_xi_ids;
  std::size_t t_star = 0;
  Vector returned_point;
  std::vector<IterationDiagnostics> diagnostics;
  Vector weighted_average;  // Σ η_t x_t / Σ η_t over t = 0..T
  Vector uniform_average;   // (1/(T+1)) Σ x_t
  Vector averaged_point;    // η-weighted average, or the uniform one under the 1/(μ(t+1)) schedule
};

/// λ from the config or the regime default: 1/(2(τ+ρ)) in regimes A/B (1 when τ+ρ = 0), 1 in C.
double resolve_lambda(const ProblemInstance& problem, const SolverConfig& config);

/// Constant step of the corollaries: A: 1/(1/λ + √(T+1)/α), B: 1/(M + 1/λ + √(T+1)/α),
/// C: α/√(T+1).
double stepsize_constant(double lambda, double alpha, std::size_t T, Regime regime,
                         double smooth_M = 0.0);

/// η_0..η_T for the configured schedule, validated against the regime's step-size rules.
std::vector<double> make_schedule(const ProblemInstance& problem, const SolverConfig& config,
                                  double lambda);

/// P(t* = t) ∝ η_t/(1 − η_t ρ).
std::vector<double> tstar_probabilities(const std::vector<double>& etas, double rho);
std::size_t sample_tstar(const std::vector<double>& etas, double rho, Rng& rng);

RunTrace run_model_based(const ProblemInstance& problem, const SolverConfig& config);
RunTrace run_mirror_descent_smooth(const ProblemInstance& problem, const SolverConfig& config);
RunTrace run_convex(const ProblemInstance& problem, const SolverConfig& config,
                    bool average = true);
/// Dispatches on the problem's regime.
RunTrace run(const ProblemInstance& problem, const SolverConfig& config);

/// Convex-case gap bound (D(x*,x0) + Σ(η𝖫)²/4 + η₀(r(x0) − inf r)) / Ση for the given steps.
double convex_rate_bound(const ProblemInstance& problem, const std::vector<double>& etas);
/// Strongly convex gap bound (𝖫²(1+log(T+1))/(4μ) + r(x0) − inf r + μD(x*,x0)) / (T+1).
double strongly_convex_rate_bound(const ProblemInstance& problem, std::size_t T, double mu);

/// Σ a_t (b_t − b_{t+1}) and its bound a_0 (b_0 − min_t b_t) for nonincreasing a ≥ 0.
struct TelescopeCheck {
  double lhs = 0.0;
  double rhs = 0.0;
};
TelescopeCheck telescoping_bound(const std::vector<double>& a, const std::vector<double>& b);

// ---------------------------------------------------------------- sweeps

struct SweepOptions {
  std::vector<std::size_t> horizons;
  std::size_t n_seeds = 20;
  std::uint64_t base_seed = 1;
  unsigned threads = 1;
  bool full_tstar = false;  // average the metric over the full t* distribution
  SolverConfig config;      // template; horizon_T and seed are overwritten per cell
};

struct SweepRow {
  std::string regime;
  std::string problem_id;
  std::size_t T = 0;
  std::uint64_t seed = 0;
  double eta0 = 0.0;
  double lambda = 0.0;
  std::string metric_name;
  double metric_value = 0.0;
  double wall_ms = 0.0;
};

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::vector<std::size_t> horizons;
  std::size_t n_seeds = 0;
  bool converged = false;           // metric identically zero; slope undefined
  std::vector<double> means;        // per horizon
  std::vector<double> std_errors;   // per horizon
};

struct SweepResult {
  std::vector<SweepRow> rows;  // sorted by (T, seed, metric)
  SlopeFit fit;
  std::string primary_metric;
};

/// Metric of one finished run: E[D_Φ(x̂_{t*}, x_{t*})] for regimes A/B (single draw or full
/// t* distribution), F(x̄) − F* for regime C.
std::vector<std::pair<std::string, double>> run_metrics(const ProblemInstance& problem,
                                                        const RunTrace& trace, bool full_tstar,
                                                        double inner_tol);

SweepResult sweep(const ProblemInstance& problem, const SweepOptions& options);

/// Least-squares fit of log(mean) against log(T).
SlopeFit fit_loglog(const std::vector<std::size_t>& horizons, const std::vector<double>& means);

}  // namespace bregopt
