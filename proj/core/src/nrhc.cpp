#include "rhc/nrhc.hpp"

#include <cmath>
#include <string>

#include "rhc/errors.hpp"

namespace rhc {

NrhcConfig NrhcConfig::identity_weights(int n) {
    NrhcConfig cfg;
    cfg.Q = Matrix::Identity(n, n);
    cfg.R = Matrix::Identity(n, n);
    cfg.A_s = 60.0 * Matrix::Identity(n, n);
    return cfg;
}

namespace {

bool symmetric_positive_definite(const Matrix& M) {
    if (M.rows() != M.cols() || !M.allFinite()) return false;
    if (!M.isApprox(M.transpose(), 1e-12)) return false;
    Eigen::LLT<Matrix> llt(M);
    return llt.info() == Eigen::Success;
}

}  // namespace

void NrhcConfig::validate(int n) const {
    if (Q.rows() != n || !symmetric_positive_definite(Q)) throw ConfigError("nrhc.Q", "must be symmetric positive definite");
    if (R.rows() != n || !symmetric_positive_definite(R)) throw ConfigError("nrhc.R", "must be symmetric positive definite");
    if (A_s.rows() != n || A_s.cols() != n || !A_s.allFinite()) throw ConfigError("nrhc.A_s", "must be a finite n x n matrix");
    const Eigen::VectorXcd ev = A_s.eigenvalues();
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (!(ev(i).real() > 0.0)) throw ConfigError("nrhc.A_s", "eigenvalues must have positive real part");
    }
    if (!(T_f > 0.0) || !std::isfinite(T_f)) throw ConfigError("nrhc.T_f", "must be positive");
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ConfigError("nrhc.alpha", "must be positive");
    if (!(t_s > 0.0) || !std::isfinite(t_s)) throw ConfigError("nrhc.t_s", "must be positive");
    if (N_tau < 1) throw ConfigError("nrhc.N_tau", "must be at least 1");
    if (!(divergence_threshold > 0.0)) throw ConfigError("nrhc.divergence_threshold", "must be positive");
}

Horizon horizon(double t, double T_f, double alpha) {
    const double decay = std::exp(-alpha * t);
    return {T_f * (1.0 - decay), T_f * alpha * decay};
}

Vector control_from_costate(const Vector& lambda, const Matrix& R) {
    return -0.5 * R.llt().solve(lambda);
}

Matrix sweep_L(const Matrix& R) {
    return 0.5 * R.llt().solve(Matrix::Identity(R.rows(), R.cols()));
}

namespace {

// 2Qe + f_y' lambda
Vector hamiltonian_y(const Matrix& Q, const Matrix& f_y, const Vector& e, const Vector& lambda) {
    return 2.0 * Q * e + f_y.transpose() * lambda;
}

}  // namespace

HamiltonianGradients hamiltonian_gradients(const Vector& y, const Vector& lambda, const Vector& theta_hat,
                                           const Vector& e, const NrhcConfig& cfg, const ModelSpec& model) {
    HamiltonianGradients out;
    out.f_y = model.jacobian(y, theta_hat);
    out.H_y = hamiltonian_y(cfg.Q, out.f_y, e, lambda);
    out.H_yy = 2.0 * cfg.Q + model.hess_contract(y, theta_hat, lambda);
    return out;
}

double hamiltonian(const Vector& y, const Vector& lambda, const Vector& theta_hat, const Vector& x,
                   const NrhcConfig& cfg, const ModelSpec& model) {
    const Vector e = y - x;
    const Vector u = control_from_costate(lambda, cfg.R);
    return e.dot(cfg.Q * e) + u.dot(cfg.R * u) + lambda.dot(model.rhs(y, theta_hat) + u);
}

void SweepWorkspace::resize(int N_tau, int n) {
    const auto nodes = static_cast<std::size_t>(N_tau) + 1;
    tau.assign(nodes, 0.0);
    y_star.assign(nodes, Vector::Zero(n));
    lambda_star.assign(nodes, Vector::Zero(n));
    S.assign(nodes, Matrix::Zero(n, n));
    c.assign(nodes, Vector::Zero(n));
    F = Vector::Zero(n);
    horizon = 0.0;
}

void forward_sweep(const SimState& state, double T, const NrhcConfig& cfg, const ModelSpec& model,
                   SweepWorkspace& ws) {
    const int n = model.n;
    if (ws.nodes() != static_cast<std::size_t>(cfg.N_tau) + 1 || ws.F.size() != n) ws.resize(cfg.N_tau, n);

    const double h = T / cfg.N_tau;
    ws.horizon = T;
    ws.y_star[0] = state.y;
    ws.lambda_star[0] = state.lambda;
    ws.tau[0] = 0.0;

    if (!(h > 0.0)) {
        // Empty horizon: every node collapses onto tau = 0.
        for (std::size_t i = 1; i < ws.nodes(); ++i) {
            ws.tau[i] = 0.0;
            ws.y_star[i] = state.y;
            ws.lambda_star[i] = state.lambda;
        }
        ws.F = state.lambda;
        return;
    }

    const Vector& x = state.x;
    const Vector& theta = state.theta_hat;
    const OdeRhs euler_lagrange = [&](double, const Vector& z) {
        const Vector y = z.head(n);
        const Vector lambda = z.tail(n);
        Vector dz(2 * n);
        dz.head(n) = model.rhs(y, theta) + control_from_costate(lambda, cfg.R);
        dz.tail(n) = -hamiltonian_y(cfg.Q, model.jacobian(y, theta), y - x, lambda);
        return dz;
    };

    Vector z(2 * n);
    z << state.y, state.lambda;
    for (std::size_t i = 1; i < ws.nodes(); ++i) {
        const double tau0 = static_cast<double>(i - 1) * h;
        try {
            z = step(euler_lagrange, tau0, z, h, cfg.stepper);
        } catch (const NumericalError&) {
            throw NumericalError("forward sweep produced non-finite values at tau node " + std::to_string(i),
                                 state.t, static_cast<std::ptrdiff_t>(i));
        }
        ws.tau[i] = i + 1 == ws.nodes() ? T : static_cast<double>(i) * h;
        ws.y_star[i] = z.head(n);
        ws.lambda_star[i] = z.tail(n);
    }
    ws.F = ws.lambda_star.back();
}

void riccati_sweep(const std::vector<Matrix>& G, const Matrix& L, const std::vector<Matrix>& K,
                   const Vector& c_terminal, StepperKind kind, SweepWorkspace& ws) {
    const std::size_t nodes = ws.nodes();
    const auto n = c_terminal.size();
    const auto nn = n * n;

    ws.S.back() = Matrix::Zero(n, n);
    ws.c.back() = c_terminal;

    for (std::size_t i = nodes - 1; i > 0; --i) {
        const double h = ws.tau[i] - ws.tau[i - 1];
        if (!(h > 0.0)) {
            ws.S[i - 1] = ws.S[i];
            ws.c[i - 1] = ws.c[i];
            continue;
        }
        // Integrate in s = tau_i - tau, so dS/ds = -S_tau and dc/ds = -c_tau.
        const Matrix& G0 = G[i];
        const Matrix& G1 = G[i - 1];
        const Matrix& K0 = K[i];
        const Matrix& K1 = K[i - 1];
        const OdeRhs riccati = [&](double s, const Vector& w) {
            const double frac = s / h;
            const Matrix Gs = (1.0 - frac) * G0 + frac * G1;
            const Matrix Ks = (1.0 - frac) * K0 + frac * K1;
            const Eigen::Map<const Matrix> S(w.data(), n, n);
            const auto c = w.segment(nn, n);
            const Matrix GtS = Gs.transpose() * S;
            const Matrix SL = S * L;
            Vector dw(nn + n);
            Eigen::Map<Matrix> dS(dw.data(), n, n);
            dS = GtS + GtS.transpose() - SL * S + Ks;
            dw.segment(nn, n) = (Gs.transpose() - SL) * c;
            return dw;
        };
        Vector w(nn + n);
        Eigen::Map<Matrix>(w.data(), n, n) = ws.S[i];
        w.segment(nn, n) = ws.c[i];
        try {
            w = step(riccati, 0.0, w, h, kind);
        } catch (const NumericalError& err) {
            throw NumericalError("backward sweep produced non-finite values at tau node " + std::to_string(i - 1),
                                 err.time(), static_cast<std::ptrdiff_t>(i - 1));
        }
        ws.S[i - 1] = Eigen::Map<const Matrix>(w.data(), n, n);
        ws.c[i - 1] = w.segment(nn, n);
    }
}

Vector backward_sweep(SweepWorkspace& ws, const SimState& state, const NrhcConfig& cfg, const ModelSpec& model,
                      double dT_dt) {
    const std::size_t nodes = ws.nodes();
    std::vector<Matrix> G(nodes);
    std::vector<Matrix> K(nodes);
    for (std::size_t i = 0; i < nodes; ++i) {
        G[i] = model.jacobian(ws.y_star[i], state.theta_hat);
        K[i] = 2.0 * cfg.Q + model.hess_contract(ws.y_star[i], state.theta_hat, ws.lambda_star[i]);
    }
    const Vector H_y_T = hamiltonian_y(cfg.Q, G.back(), ws.y_star.back() - state.x, ws.lambda_star.back());
    const Vector c_T = H_y_T * (1.0 + dT_dt) - cfg.A_s * ws.F;
    try {
        riccati_sweep(G, sweep_L(cfg.R), K, c_T, cfg.stepper, ws);
    } catch (const NumericalError& err) {
        throw NumericalError(err.what(), state.t, err.node());
    }
    return ws.c.front();
}

Vector costate_rate(const SimState& state, const Vector& c0, const ModelSpec& model, const NrhcConfig& cfg) {
    const Matrix f_y = model.jacobian(state.y, state.theta_hat);
    return -hamiltonian_y(cfg.Q, f_y, state.error(), state.lambda) + c0;
}

double horizon_cost(const SweepWorkspace& ws, const Vector& x, const NrhcConfig& cfg) {
    double J = 0.0;
    double previous = 0.0;
    for (std::size_t i = 0; i < ws.nodes(); ++i) {
        const Vector e = ws.y_star[i] - x;
        const Vector u = control_from_costate(ws.lambda_star[i], cfg.R);
        const double running = e.dot(cfg.Q * e) + u.dot(cfg.R * u);
        if (i > 0) J += 0.5 * (ws.tau[i] - ws.tau[i - 1]) * (running + previous);
        previous = running;
    }
    return J;
}

NrhcStepResult nrhc_step(const SimState& state, const NrhcConfig& cfg, const ModelSpec& model, SweepWorkspace& ws) {
    NrhcStepResult out;
    out.horizon = horizon(state.t, cfg.T_f, cfg.alpha);

    forward_sweep(state, out.horizon.T, cfg, model, ws);
    out.F_norm = ws.F.norm();
    if (!std::isfinite(out.F_norm)) {
        throw NumericalError("continuation residual is not finite", state.t, static_cast<std::ptrdiff_t>(cfg.N_tau));
    }
    if (out.F_norm > cfg.divergence_threshold) {
        throw DivergenceError("continuation residual |F| = " + std::to_string(out.F_norm) +
                                  " exceeds the divergence threshold at t = " + std::to_string(state.t),
                              state.t, out.F_norm);
    }

    const Vector c0 = backward_sweep(ws, state, cfg, model, out.horizon.dT_dt);

    // y, x and theta_hat are frozen over the sampling period; lambda enters H_y.
    SimState live = state;
    const OdeRhs costate = [&](double, const Vector& lambda) {
        live.lambda = lambda;
        return costate_rate(live, c0, model, cfg);
    };
    out.lambda_next = step(costate, state.t, state.lambda, cfg.t_s, cfg.stepper);
    out.u = control_from_costate(out.lambda_next, cfg.R);
    out.cost = horizon_cost(ws, state.x, cfg);
    return out;
}

}  // namespace rhc
