#pragma once

#include "rhc/types.hpp"

namespace rhc {

/// Live closed-loop state at one sampling instant.
struct SimState {
    double t = 0.0;
    Vector x;          ///< drive state
    Vector y;          ///< response state
    Vector lambda;     ///< costate at tau = 0
    Vector theta_hat;  ///< parameter estimate

    [[nodiscard]] Vector error() const { return y - x; }
};

}  // namespace rhc
