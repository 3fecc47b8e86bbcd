#pragma once

#include "bregopt/types.hpp"

#include <functional>
#include <optional>
#include <variant>

namespace bregopt {

/// y ↦ offset + ⟨direction, y − base⟩.
struct LinearModel {
  double offset = 0.0;
  Vector direction;
  Vector base;
};

/// y ↦ weight·|offset + ⟨slope, y − base⟩|, the prox-linear model of a scalar |·| outer function.
struct AbsLinearModel {
  double weight = 1.0;
  double offset = 0.0;
  Vector slope;
  Vector base;
};

/// Model without exploitable structure; `hessian` is empty for nonsmooth models.
struct GenericModel {
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> subgradient;
  std::function<Matrix(const Vector&)> hessian;
};

/// A single sampled model y ↦ f_x(y, ξ) with x and ξ already bound.
using StepModel = std::variant<LinearModel, AbsLinearModel, GenericModel>;

double model_value(const StepModel& model, const Vector& y);
/// Deterministic subgradient selection; |·| at its kink returns the zero-slope element.
Vector model_subgradient(const StepModel& model, const Vector& y);
/// Hessian when the model is C², otherwise nullopt.
std::optional<Matrix> model_hessian(const StepModel& model, const Vector& y);

}  // namespace bregopt
