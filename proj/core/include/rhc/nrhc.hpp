#pragma once

// Real-time nonlinear receding-horizon control by backward-sweep continuation.
//
// At every sampling instant the Euler-Lagrange equations are integrated
// forward on the artificial tau axis, the Riccati pair (S, c) is swept back
// from the horizon end, and the costate lambda(t) is advanced by one sample.
// No iteration is involved.

#include <cstddef>
#include <vector>

#include "rhc/integrate.hpp"
#include "rhc/model.hpp"
#include "rhc/sim_state.hpp"
#include "rhc/types.hpp"

namespace rhc {

struct NrhcConfig {
    Matrix Q;  ///< state-error weight, SPD
    Matrix R;  ///< control weight, SPD
    double T_f = 0.1;
    double alpha = 0.01;
    Matrix A_s;  ///< continuation gain, eigenvalues with positive real part
    double t_s = 0.01;
    int N_tau = 20;
    StepperKind stepper = StepperKind::RungeKutta4;
    double divergence_threshold = 1e6;

    /// Q = R = I, A_s = 60 I, remaining fields at their defaults.
    [[nodiscard]] static NrhcConfig identity_weights(int n);
    /// Throws ConfigError naming the first violated field.
    void validate(int n) const;
};

struct Horizon {
    double T = 0.0;
    double dT_dt = 0.0;
};

/// T(t) = T_f (1 - exp(-alpha t)) and its analytic time derivative.
[[nodiscard]] Horizon horizon(double t, double T_f, double alpha);

/// Stationary control of H = e'Qe + u'Ru + lambda'(f + u): u = -R^{-1} lambda / 2.
[[nodiscard]] Vector control_from_costate(const Vector& lambda, const Matrix& R);

struct HamiltonianGradients {
    Vector H_y;  ///< column form of dH/dy
    Matrix f_y;
    Matrix H_yy;
};

/// H_y = 2Qe + f_y' lambda, H_yy = 2Q + sum_i lambda_i d^2 f_i/dy^2.
/// With f_u = I and H_uy = 0 the sweep coefficients are G = f_y,
/// L = R^{-1}/2 and K = H_yy.
[[nodiscard]] HamiltonianGradients hamiltonian_gradients(const Vector& y, const Vector& lambda,
                                                         const Vector& theta_hat, const Vector& e,
                                                         const NrhcConfig& cfg, const ModelSpec& model);

/// Scalar Hamiltonian, for finite-difference certification.
[[nodiscard]] double hamiltonian(const Vector& y, const Vector& lambda, const Vector& theta_hat,
                                 const Vector& x, const NrhcConfig& cfg, const ModelSpec& model);

/// L = f_u H_uu^{-1} f_u' = R^{-1}/2.
[[nodiscard]] Matrix sweep_L(const Matrix& R);

/// tau-grid trajectories of one forward/backward solve.
struct SweepWorkspace {
    std::vector<double> tau;
    std::vector<Vector> y_star;
    std::vector<Vector> lambda_star;
    std::vector<Matrix> S;
    std::vector<Vector> c;
    Vector F;
    double horizon = 0.0;

    void resize(int N_tau, int n);
    [[nodiscard]] std::size_t nodes() const { return tau.size(); }
};

/// Integrate y*_tau = f(y*) + u*, lambda*_tau = -H_y over [0, T] with
/// theta_hat and the drive state x frozen, filling y*, lambda* and F.
/// Throws NumericalError with the node index on non-finite values.
void forward_sweep(const SimState& state, double T, const NrhcConfig& cfg, const ModelSpec& model,
                   SweepWorkspace& ws);

/// Backward Riccati pass for S(tau) and c(tau) with S(T) = 0 and
/// c(T) = H_y(T) (1 + dT/dt) - A_s F. Coefficients are taken at the stored
/// forward nodes (linear interpolation between nodes for inner stages).
/// Returns c(0).
Vector backward_sweep(SweepWorkspace& ws, const SimState& state, const NrhcConfig& cfg,
                      const ModelSpec& model, double dT_dt);

/// The Riccati pair integrated backward for prescribed node coefficients.
/// G and K hold one matrix per tau node. Fills ws.S and ws.c.
void riccati_sweep(const std::vector<Matrix>& G, const Matrix& L, const std::vector<Matrix>& K,
                   const Vector& c_terminal, StepperKind kind, SweepWorkspace& ws);

/// d(lambda)/dt = -H_y|_{tau=0} + c(0, t).
[[nodiscard]] Vector costate_rate(const SimState& state, const Vector& c0, const ModelSpec& model,
                                  const NrhcConfig& cfg);

struct NrhcStepResult {
    Vector u;
    Vector lambda_next;
    double F_norm = 0.0;
    double cost = 0.0;  ///< horizon cost J by trapezoidal quadrature
    Horizon horizon;
};

/// Sweep forward, sweep back, advance lambda over one sampling period and
/// return the control for the next period. Throws DivergenceError when
/// |F| exceeds cfg.divergence_threshold.
[[nodiscard]] NrhcStepResult nrhc_step(const SimState& state, const NrhcConfig& cfg, const ModelSpec& model,
                                       SweepWorkspace& ws);

/// Horizon cost of the trajectory stored in `ws` against the frozen drive state.
[[nodiscard]] double horizon_cost(const SweepWorkspace& ws, const Vector& x, const NrhcConfig& cfg);

}  // namespace rhc
