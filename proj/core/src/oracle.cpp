#include "rhc/oracle.hpp"

#include <cmath>
#include <stdexcept>

#include "rhc/integrate.hpp"

namespace rhc {

namespace {

Vector shooting_residual(const Vector& y_t, const Vector& theta_hat, const Vector& x_t, double T,
                         const NrhcConfig& cfg, const ModelSpec& model, const Vector& lambda0,
                         SweepWorkspace& ws) {
    SimState s;
    s.y = y_t;
    s.x = x_t;
    s.theta_hat = theta_hat;
    s.lambda = lambda0;
    forward_sweep(s, T, cfg, model, ws);
    return ws.F;
}

}  // namespace

ShootingResult shoot_tpbvp(const Vector& y_t, const Vector& theta_hat, const Vector& x_t, double T,
                           const NrhcConfig& cfg, const ModelSpec& model, const Vector& lambda_guess,
                           const ShootingOptions& options) {
    if (!(T > 0.0)) throw std::invalid_argument("shoot_tpbvp needs a positive horizon");

    const auto n = lambda_guess.size();
    SweepWorkspace ws;
    ws.resize(cfg.N_tau, static_cast<int>(n));
    const auto residual = [&](const Vector& lambda0) {
        return shooting_residual(y_t, theta_hat, x_t, T, cfg, model, lambda0, ws);
    };

    ShootingResult out;
    out.lambda0 = lambda_guess;
    Vector r = residual(out.lambda0);
    out.residual_norm = r.norm();
    out.history.push_back(out.residual_norm);

    for (int it = 0; it < options.max_iterations; ++it) {
        if (out.residual_norm <= options.tolerance * (1.0 + out.lambda0.norm())) {
            out.converged = true;
            return out;
        }
        Matrix J(n, n);
        for (Eigen::Index j = 0; j < n; ++j) {
            const double h = 1e-6 * (1.0 + std::abs(out.lambda0(j)));
            Vector plus = out.lambda0;
            Vector minus = out.lambda0;
            plus(j) += h;
            minus(j) -= h;
            J.col(j) = (residual(plus) - residual(minus)) / (2.0 * h);
        }
        const Vector direction = -J.colPivHouseholderQr().solve(r);
        if (!direction.allFinite()) break;

        // Halve until the residual strictly decreases.
        bool accepted = false;
        double damping = 1.0;
        for (int k = 0; k < 40; ++k, damping *= 0.5) {
            const Vector trial = out.lambda0 + damping * direction;
            const Vector r_trial = residual(trial);
            const double norm = r_trial.norm();
            if (std::isfinite(norm) && norm < out.residual_norm) {
                out.lambda0 = trial;
                r = r_trial;
                out.residual_norm = norm;
                out.history.push_back(norm);
                accepted = true;
                break;
            }
        }
        out.iterations = it + 1;
        if (!accepted) break;
    }
    out.converged = out.residual_norm <= options.tolerance * (1.0 + out.lambda0.norm());
    return out;
}

SteadyState steady_state(const HivParams& q) {
    if (q.beta * q.k == 0.0 || q.mu1 * q.mu2 == 0.0) {
        throw std::invalid_argument("steady_state needs beta*k and mu1*mu2 nonzero");
    }
    const double x1 = q.mu1 * q.mu2 / (q.beta * q.k);
    const double x2 = (q.s - q.d * x1) / q.mu1;
    const double x3 = q.k * x2 / q.mu2;
    return {Vector{{x1, x2, x3}}, x2 < 0.0};
}

Vector fd_gradient(const ScalarField& field, const Vector& point, double h) {
    return fd_gradient(field, point, Vector::Constant(point.size(), h));
}

Vector fd_gradient(const ScalarField& field, const Vector& point, const Vector& h) {
    Vector grad(point.size());
    for (Eigen::Index i = 0; i < point.size(); ++i) {
        Vector plus = point;
        Vector minus = point;
        plus(i) += h(i);
        minus(i) -= h(i);
        grad(i) = (field(plus) - field(minus)) / (2.0 * h(i));
    }
    return grad;
}

Matrix fd_jacobian(const VectorField& field, const Vector& point, const Vector& h) {
    const Vector f0 = field(point);
    Matrix J(f0.size(), point.size());
    for (Eigen::Index j = 0; j < point.size(); ++j) {
        Vector plus = point;
        Vector minus = point;
        plus(j) += h(j);
        minus(j) -= h(j);
        J.col(j) = (field(plus) - field(minus)) / (2.0 * h(j));
    }
    return J;
}

Matrix fd_hessian(const ScalarField& field, const Vector& point, const Vector& h) {
    const auto n = point.size();
    Matrix H(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i; j < n; ++j) {
            const auto eval = [&](double si, double sj) {
                Vector v = point;
                v(i) += si * h(i);
                v(j) += sj * h(j);
                return field(v);
            };
            H(i, j) = (eval(1, 1) - eval(1, -1) - eval(-1, 1) + eval(-1, -1)) / (4.0 * h(i) * h(j));
            H(j, i) = H(i, j);
        }
    }
    return H;
}

double scalar_lq_costate(double q, double r, double T, double e0) {
    const double P0 = std::sqrt(q * r) * std::tanh(std::sqrt(q / r) * T);
    return 2.0 * P0 * e0;
}

Matrix lq_riccati_p0(const Matrix& A, const Matrix& Q, const Matrix& R, double T, int steps) {
    const auto n = A.rows();
    const Matrix R_inv = R.llt().solve(Matrix::Identity(n, n));
    // s = T - tau runs forward from the terminal condition.
    const OdeRhs riccati = [&](double, const Vector& w) {
        const Eigen::Map<const Matrix> P(w.data(), n, n);
        Vector dw(n * n);
        Eigen::Map<Matrix>(dw.data(), n, n) = Q + A.transpose() * P + P * A - P * R_inv * P;
        return dw;
    };
    Vector w = Vector::Zero(n * n);
    if (T <= 0.0) return Matrix::Zero(n, n);
    const double h = T / steps;
    for (int k = 0; k < steps; ++k) w = step(riccati, k * h, w, h, StepperKind::RungeKutta4);
    return Eigen::Map<const Matrix>(w.data(), n, n);
}

double relative_error(const Matrix& a, const Matrix& b) {
    const double scale = std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff());
    if (scale == 0.0) return 0.0;
    return (a - b).cwiseAbs().maxCoeff() / scale;
}

GradientCertification certify_gradients(const ModelSpec& model, const NrhcConfig& cfg,
                                        const std::vector<GradientSample>& samples) {
    GradientCertification cert;
    for (const auto& s : samples) {
        const HamiltonianGradients grads =
            hamiltonian_gradients(s.y, s.lambda, s.theta_hat, s.y - s.x, cfg, model);

        const ScalarField H = [&](const Vector& y) { return hamiltonian(y, s.lambda, s.theta_hat, s.x, cfg, model); };
        const VectorField f = [&](const Vector& y) { return model.rhs(y, s.theta_hat); };

        const Vector scale = Vector::Ones(s.y.size()) + s.y.cwiseAbs();
        const Vector fd_H_y = fd_gradient(H, s.y, Vector(1e-5 * scale));
        const Matrix fd_f_y = fd_jacobian(f, s.y, 1e-5 * scale);
        // Second differences lose eps*|H|/h^2 to rounding and |H| grows with |e|^2,
        // so the step also scales with the tracking error.
        const Vector hess_step = 1e-3 * scale + Vector::Constant(s.y.size(), 1e-5 * (s.y - s.x).cwiseAbs().maxCoeff());
        const Matrix fd_H_yy = fd_hessian(H, s.y, hess_step);

        cert.max_rel_H_y = std::max(cert.max_rel_H_y, relative_error(grads.H_y, fd_H_y));
        cert.max_rel_f_y = std::max(cert.max_rel_f_y, relative_error(grads.f_y, fd_f_y));
        cert.max_rel_H_yy = std::max(cert.max_rel_H_yy, relative_error(grads.H_yy, fd_H_yy));
        ++cert.samples;
    }
    return cert;
}

std::vector<GradientSample> hiv_gradient_samples(const Vector& theta_scale, int count, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const Vector state_scale{{2000.0, 200.0, 30000.0}};
    const auto draw_state = [&] {
        Vector v(3);
        for (int i = 0; i < 3; ++i) v(i) = state_scale(i) * unit(rng);
        return v;
    };
    std::vector<GradientSample> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        GradientSample s;
        s.y = draw_state();
        s.x = draw_state();
        s.lambda = Vector(3);
        for (int i = 0; i < 3; ++i) s.lambda(i) = 20.0 * unit(rng) - 10.0;
        s.theta_hat = theta_scale;
        for (Eigen::Index i = 0; i < theta_scale.size(); ++i) s.theta_hat(i) *= 0.5 + unit(rng);
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace rhc
