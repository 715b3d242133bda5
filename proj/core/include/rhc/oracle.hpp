#pragma once

// Slow, independent reference computations used to validate the real-time
// solver: single shooting on the costate, finite differences, the HIV
// equilibrium and closed-form linear-quadratic costates.

#include <functional>
#include <random>
#include <vector>

#include "rhc/model.hpp"
#include "rhc/nrhc.hpp"

namespace rhc {

struct ShootingResult {
    Vector lambda0;
    double residual_norm = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<double> history;  ///< residual norm after each accepted Newton step
};

struct ShootingOptions {
    int max_iterations = 50;
    double tolerance = 1e-8;  ///< converged when |F| <= tolerance * (1 + |lambda0|)
};

/// Damped Newton on lambda0 -> lambda*(T) using the forward sweep and a
/// central-difference Jacobian with steps 1e-6 (1 + |lambda_i|).
/// Requires T > 0 (std::invalid_argument otherwise).
[[nodiscard]] ShootingResult shoot_tpbvp(const Vector& y_t, const Vector& theta_hat, const Vector& x_t,
                                         double T, const NrhcConfig& cfg, const ModelSpec& model,
                                         const Vector& lambda_guess, const ShootingOptions& options = {});

struct SteadyState {
    Vector point;
    bool infected_free = false;  ///< the infected equilibrium has x2 < 0
};

/// Infected equilibrium of the HIV model. Throws std::invalid_argument if
/// beta * k or mu1 * mu2 vanishes.
[[nodiscard]] SteadyState steady_state(const HivParams& params);

using ScalarField = std::function<double(const Vector&)>;
using VectorField = std::function<Vector(const Vector&)>;

/// Central differences with a uniform step.
[[nodiscard]] Vector fd_gradient(const ScalarField& field, const Vector& point, double h);
/// Central differences with per-component steps.
[[nodiscard]] Vector fd_gradient(const ScalarField& field, const Vector& point, const Vector& h);
[[nodiscard]] Matrix fd_jacobian(const VectorField& field, const Vector& point, const Vector& h);
/// Second central differences of a scalar field (symmetric result).
[[nodiscard]] Matrix fd_hessian(const ScalarField& field, const Vector& point, const Vector& h);

/// lambda(0) = 2 P(0) e0 for ydot = u with cost q e^2 + r u^2 over [0, T]:
/// P(0) = sqrt(q r) tanh(sqrt(q / r) T).
[[nodiscard]] double scalar_lq_costate(double q, double r, double T, double e0);

/// P(0) of  -dP/dtau = Q + A'P + PA - P R^{-1} P,  P(T) = 0, by fine RK4.
/// The corresponding costate of the linear system ydot = A y + u is 2 P(0) y.
[[nodiscard]] Matrix lq_riccati_p0(const Matrix& A, const Matrix& Q, const Matrix& R, double T,
                                   int steps = 2000);

/// max(|a - b|) / max(|a|, |b|), 0 when both vanish.
[[nodiscard]] double relative_error(const Matrix& a, const Matrix& b);

struct GradientCertification {
    double max_rel_H_y = 0.0;
    double max_rel_f_y = 0.0;
    double max_rel_H_yy = 0.0;
    int samples = 0;
};

struct GradientSample {
    Vector y;
    Vector x;
    Vector lambda;
    Vector theta_hat;
};

/// Compares hamiltonian_gradients with finite differences of the scalar
/// Hamiltonian (H_y, H_yy) and of the model field (f_y) at every sample.
[[nodiscard]] GradientCertification certify_gradients(const ModelSpec& model, const NrhcConfig& cfg,
                                                      const std::vector<GradientSample>& samples);

/// Random HIV-scale samples (states up to ~2e3 / 2e2 / 3e4, costates O(10),
/// estimates around `theta_scale`).
[[nodiscard]] std::vector<GradientSample> hiv_gradient_samples(const Vector& theta_scale, int count,
                                                               std::mt19937_64& rng);

}  // namespace rhc
