#pragma once

#include "bregopt/driver.hpp"
#include "bregopt/problem_instance.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace bregopt {

using Json = nlohmann::json;

/// Shortest round-trip decimal form ("%.17g"); "inf"/"-inf"/"nan" for non-finite values.
std::string format_double(double value);
/// Accepts a JSON number or a decimal string.
double parse_double(const Json& value);
double parse_double(const std::string& text);

Json vector_to_json(const Vector& v);
Vector vector_from_json(const Json& j);

/// {"kind": ..., "coeffs": [...]} plus "children"/"weights" for weighted sums.
Json phi_to_json(const LegendreFunction& phi);
LegendreFunction phi_from_json(const Json& j);

Json regularizer_to_json(const Regularizer& r);
Regularizer regularizer_from_json(const Json& j);

Json constants_to_json(const ModelConstants& k);
ModelConstants constants_from_json(const Json& j);

/// Full instance including the oracle's data arrays; numbers are written as decimal strings.
Json instance_to_json(const ProblemInstance& problem);
ProblemInstance instance_from_json(const Json& j);

Json solver_config_to_json(const SolverConfig& config);
SolverConfig solver_config_from_json(const Json& j);

Json slope_to_json(const SlopeFit& fit);

/// Per-iteration trace: t, xi, eta, model_value, r_value, step_divergence,
/// three_point_residual, inner_iterations, x_0..x_{d-1} (the iterate x_{t+1}).
void write_trace_csv(std::ostream& out, const RunTrace& trace);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};
CsvTable read_csv(std::istream& in);

/// Columns regime,problem_id,T,seed,eta0,lambda,metric_name,metric_value,wall_ms.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);
std::vector<SweepRow> read_sweep_csv(std::istream& in);

}  // namespace bregopt
