#pragma once

#include <functional>
#include <string_view>
#include <optional>

#include "rhc/types.hpp"

namespace rhc {

enum class StepperKind { ForwardEuler, RungeKutta4 };

[[nodiscard]] std::string_view to_string(StepperKind kind);
/// Accepts "euler" and "rk4".
[[nodiscard]] std::optional<StepperKind> parse_stepper(std::string_view name);

using OdeRhs = std::function<Vector(double t, const Vector& y)>;

/// One explicit fixed step of size h from (t, y). Throws NumericalError
/// (carrying t) if the result is not finite, std::invalid_argument if h <= 0.
[[nodiscard]] Vector step(const OdeRhs& rhs, double t, const Vector& y, double h, StepperKind kind);

}  // namespace rhc
