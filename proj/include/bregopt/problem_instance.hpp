#pragma once

#include "bregopt/models.hpp"
#include "bregopt/subproblem.hpp"

#include <optional>
#include <string>

namespace bregopt {

struct Optimum {
  double F_star = 0.0;
  Vector x_star;
};

/// One optimization problem min F = f + r together with its geometry and ground truth.
struct ProblemInstance {
  std::string id;
  std::string description;
  OraclePtr oracle;
  Regularizer regularizer;
  LegendreFunction phi = LegendreFunction::euclidean();
  Regime regime = Regime::A;
  Vector x0;
  std::optional<Optimum> optimum;
  PointSampler points;             // feasible points used by the verification suite
  double alpha = 1.0;              // default constant-schedule parameter
  std::optional<double> lambda;    // default envelope/step parameter override

  std::size_t dimension() const { return static_cast<std::size_t>(x0.size()); }
  const ModelConstants& constants() const { return oracle->constants(); }
  double F(const Vector& x) const { return oracle->f_value(x) + regularizer.value(x); }
};

}  // namespace bregopt
