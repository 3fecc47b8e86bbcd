#include "bregopt/step_model.hpp"

#include <cmath>

namespace bregopt {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

double model_value(const StepModel& model, const Vector& y) {
  return std::visit(
      Overloaded{
          [&](const LinearModel& m) { return m.offset + m.direction.dot(y - m.base); },
          [&](const AbsLinearModel& m) {
            return m.weight * std::abs(m.offset + m.slope.dot(y - m.base));
          },
          [&](const GenericModel& m) { return m.value(y); },
      },
      model);
}

Vector model_subgradient(const StepModel& model, const Vector& y) {
  return std::visit(
      Overloaded{
          [&](const LinearModel& m) -> Vector { return m.direction; },
          [&](const AbsLinearModel& m) -> Vector {
            const double arg = m.offset + m.slope.dot(y - m.base);
            if (arg == 0.0) return Vector::Zero(y.size());
            return (arg > 0.0 ? m.weight : -m.weight) * m.slope;
          },
          [&](const GenericModel& m) -> Vector { return m.subgradient(y); },
      },
      model);
}

std::optional<Matrix> model_hessian(const StepModel& model, const Vector& y) {
  return std::visit(
      Overloaded{
          [&](const LinearModel&) -> std::optional<Matrix> {
            return Matrix::Zero(y.size(), y.size());
          },
          [&](const AbsLinearModel&) -> std::optional<Matrix> { return std::nullopt; },
          [&](const GenericModel& m) -> std::optional<Matrix> {
            if (!m.hessian) return std::nullopt;
            return m.hessian(y);
          },
      },
      model);
}

}  // namespace bregopt
