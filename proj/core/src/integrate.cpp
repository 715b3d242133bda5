#include "rhc/integrate.hpp"

#include <stdexcept>
#include <string>

#include "rhc/errors.hpp"

namespace rhc {

std::string_view to_string(StepperKind kind) {
    return kind == StepperKind::ForwardEuler ? "euler" : "rk4";
}

std::optional<StepperKind> parse_stepper(std::string_view name) {
    if (name == "euler") return StepperKind::ForwardEuler;
    if (name == "rk4") return StepperKind::RungeKutta4;
    return std::nullopt;
}

Vector step(const OdeRhs& rhs, double t, const Vector& y, double h, StepperKind kind) {
    if (!(h > 0.0)) throw std::invalid_argument("step size must be positive");

    Vector next;
    if (kind == StepperKind::ForwardEuler) {
        next = y + h * rhs(t, y);
    } else {
        const double half = 0.5 * h;
        const Vector k1 = rhs(t, y);
        const Vector k2 = rhs(t + half, y + half * k1);
        const Vector k3 = rhs(t + half, y + half * k2);
        const Vector k4 = rhs(t + h, y + h * k3);
        next = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    if (!next.allFinite()) {
        throw NumericalError("non-finite state after " + std::string(to_string(kind)) + " step at t = " +
                                 std::to_string(t),
                             t);
    }
    return next;
}

}  // namespace rhc
