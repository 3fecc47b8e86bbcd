#pragma once

#include "bregopt/driver.hpp"
#include "bregopt/problem_instance.hpp"

#include <functional>
#include <string>
#include <vector>

namespace bregopt {

/// Identifiers of the registered instances, in registry order.
std::vector<std::string> problem_ids();
/// Builds a registered instance; throws ConfigError for unknown ids.
ProblemInstance make_problem(const std::string& id);
std::vector<ProblemInstance> registry();

/// Feasible sampler matching the region: the simplex, the constraint ball, a positive ball for
/// orthant geometries, and a radius-3 ball otherwise.
PointSampler default_points(const Regularizer& r, const LegendreFunction& phi, std::size_t dim);

/// Default solver settings: the 1/(μ(t+1)) schedule for relatively strongly convex regime C
/// instances, the constant-α schedule with the instance's α otherwise.
SolverConfig default_config(const ProblemInstance& problem);

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct ValidationOptions {
  std::size_t n_pairs = 1000;   // point pairs for geometry, Lipschitz and smoothness checks
  std::size_t n_samples = 4000; // Monte Carlo draws for noisy one-sided and variance checks
  std::uint64_t seed = 7;
};

/// Runs the regime's verify_* suite and the geometry invariants on one instance.
std::vector<CheckResult> validate(const ProblemInstance& problem,
                                  const ValidationOptions& options = {});
bool all_pass(const std::vector<CheckResult>& checks);

enum class OracleMethod { grid, golden_section, projected_descent_long };
std::string to_string(OracleMethod method);

struct OracleResult {
  double value = kInf;
  Vector argmin;
  OracleMethod method = OracleMethod::grid;
  double resolution = 0.0;
};

/// Axis-aligned search box [lower, upper] for the brute-force oracle.
struct Box {
  Vector lower;
  Vector upper;
};

/// Independent ground truth for min F: golden section in 1-D (and on the 2-D simplex),
/// a zooming grid in 2-D (plus an angular scan of the circle under a ball constraint), long
/// projected subgradient descent otherwise.
OracleResult brute_force_min(const ProblemInstance& problem, const Box& box, double resolution);
/// Zooming grid search of a 2-D function: a full grid at `resolution`, then six rounds
/// refining ±2 cells around the incumbent at ten times finer spacing.
OracleResult grid_min(const std::function<double(const Vector&)>& F, const Box& box,
                      double resolution);
/// Default box: the constraint's bounding box, or a box around x0 and the known optimum.
Box default_box(const ProblemInstance& problem);

/// Golden-section minimization of a unimodal function on [lo, hi] down to `tol`.
double golden_section(const std::function<double(double)>& f, double lo, double hi, double tol);

}  // namespace bregopt
