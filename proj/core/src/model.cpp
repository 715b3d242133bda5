#include "rhc/model.hpp"

#include <cmath>
#include <stdexcept>

namespace rhc {

Vector ModelSpec::rhs(const Vector& y, const Vector& theta) const {
    return g(y) + regressor(y) * theta;
}

Matrix ModelSpec::jacobian(const Vector& y, const Vector& theta) const {
    return jac_g(y) + jac_d_theta(y, theta);
}

std::string_view to_string(HivParam p) {
    switch (p) {
        case HivParam::s: return "s";
        case HivParam::d: return "d";
        case HivParam::beta: return "beta";
        case HivParam::mu1: return "mu1";
        case HivParam::k: return "k";
        case HivParam::mu2: return "mu2";
    }
    return "?";
}

std::optional<HivParam> parse_hiv_param(std::string_view name) {
    for (HivParam p : kAllHivParams) {
        if (to_string(p) == name) return p;
    }
    return std::nullopt;
}

double HivParams::get(HivParam which) const {
    switch (which) {
        case HivParam::s: return s;
        case HivParam::d: return d;
        case HivParam::beta: return beta;
        case HivParam::mu1: return mu1;
        case HivParam::k: return k;
        case HivParam::mu2: return mu2;
    }
    return 0.0;
}

void HivParams::set(HivParam which, double value) {
    switch (which) {
        case HivParam::s: s = value; break;
        case HivParam::d: d = value; break;
        case HivParam::beta: beta = value; break;
        case HivParam::mu1: mu1 = value; break;
        case HivParam::k: k = value; break;
        case HivParam::mu2: mu2 = value; break;
    }
}

void HivParams::validate() const {
    for (HivParam p : kAllHivParams) {
        const double v = get(p);
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw std::invalid_argument("HIV rate '" + std::string(to_string(p)) + "' must be strictly positive");
        }
    }
}

Vector hiv_rhs(const Vector& state, const HivParams& q) {
    const double x1 = state(0);
    const double x2 = state(1);
    const double x3 = state(2);
    Vector out(3);
    out << q.s - q.d * x1 - q.beta * x1 * x3,
           q.beta * x1 * x3 - q.mu1 * x2,
           q.k * x2 - q.mu2 * x3;
    return out;
}

namespace {

// Column of D belonging to one rate: the rate's coefficient in each row.
Vector regressor_column(HivParam which, const Vector& y) {
    Vector col = Vector::Zero(3);
    switch (which) {
        case HivParam::s: col(0) = 1.0; break;
        case HivParam::d: col(0) = -y(0); break;
        case HivParam::beta:
            col(0) = -y(0) * y(2);
            col(1) = y(0) * y(2);
            break;
        case HivParam::mu1: col(1) = -y(1); break;
        case HivParam::k: col(2) = y(1); break;
        case HivParam::mu2: col(2) = -y(2); break;
    }
    return col;
}

// Derivative of regressor_column(which, y) with respect to y.
Matrix regressor_column_jacobian(HivParam which, const Vector& y) {
    Matrix J = Matrix::Zero(3, 3);
    switch (which) {
        case HivParam::s: break;
        case HivParam::d: J(0, 0) = -1.0; break;
        case HivParam::beta:
            J(0, 0) = -y(2);
            J(0, 2) = -y(0);
            J(1, 0) = y(2);
            J(1, 2) = y(0);
            break;
        case HivParam::mu1: J(1, 1) = -1.0; break;
        case HivParam::k: J(2, 1) = 1.0; break;
        case HivParam::mu2: J(2, 2) = -1.0; break;
    }
    return J;
}

HivParams zero_unknowns(const UnknownSet& unknown, HivParams known) {
    for (HivParam p : unknown) known.set(p, 0.0);
    return known;
}

Matrix rhs_jacobian(const Vector& y, const HivParams& q) {
    Matrix J(3, 3);
    J << -q.d - q.beta * y(2), 0.0, -q.beta * y(0),
         q.beta * y(2), -q.mu1, q.beta * y(0),
         0.0, q.k, -q.mu2;
    return J;
}

void check_unknown(const UnknownSet& unknown) {
    if (unknown.empty()) throw std::invalid_argument("unknown parameter set must not be empty");
    for (std::size_t i = 0; i < unknown.size(); ++i) {
        for (std::size_t j = i + 1; j < unknown.size(); ++j) {
            if (unknown[i] == unknown[j]) {
                throw std::invalid_argument("parameter '" + std::string(to_string(unknown[i])) +
                                            "' listed twice in the unknown set");
            }
        }
    }
}

// Only beta * x1 * x3 is curved; its weight in the contraction is lambda2 - lambda1.
double effective_beta(const UnknownSet& unknown, const HivParams& fixed, const Vector& theta) {
    for (std::size_t j = 0; j < unknown.size(); ++j) {
        if (unknown[j] == HivParam::beta) return theta(static_cast<Eigen::Index>(j));
    }
    return fixed.beta;
}

}  // namespace

ModelSpec hiv_split(const UnknownSet& unknown, const HivParams& known) {
    check_unknown(unknown);
    const HivParams fixed = zero_unknowns(unknown, known);

    ModelSpec m;
    m.n = 3;
    m.p = static_cast<int>(unknown.size());
    for (HivParam p : unknown) m.param_names.emplace_back(to_string(p));

    m.g = [fixed](const Vector& y) { return hiv_rhs(y, fixed); };
    m.regressor = [unknown](const Vector& y) {
        Matrix D(3, static_cast<Eigen::Index>(unknown.size()));
        for (std::size_t j = 0; j < unknown.size(); ++j) {
            D.col(static_cast<Eigen::Index>(j)) = regressor_column(unknown[j], y);
        }
        return D;
    };
    m.jac_g = [fixed](const Vector& y) { return rhs_jacobian(y, fixed); };
    m.jac_d_theta = [unknown](const Vector& y, const Vector& theta) {
        Matrix J = Matrix::Zero(3, 3);
        for (std::size_t j = 0; j < unknown.size(); ++j) {
            J += theta(static_cast<Eigen::Index>(j)) * regressor_column_jacobian(unknown[j], y);
        }
        return J;
    };
    m.hess_contract = [unknown, fixed](const Vector&, const Vector& theta, const Vector& lambda) {
        const double w = (lambda(1) - lambda(0)) * effective_beta(unknown, fixed, theta);
        Matrix H = Matrix::Zero(3, 3);
        H(0, 2) = w;
        H(2, 0) = w;
        return H;
    };
    return m;
}

Matrix hiv_jacobian(const Vector& state, const Vector& estimate, const UnknownSet& unknown,
                    const HivParams& known) {
    if (estimate.size() != static_cast<Eigen::Index>(unknown.size())) {
        throw std::invalid_argument("estimate length does not match the unknown set");
    }
    HivParams q = known;
    for (std::size_t j = 0; j < unknown.size(); ++j) q.set(unknown[j], estimate(static_cast<Eigen::Index>(j)));
    return rhs_jacobian(state, q);
}

Vector hiv_theta(const UnknownSet& unknown, const HivParams& params) {
    Vector theta(static_cast<Eigen::Index>(unknown.size()));
    for (std::size_t j = 0; j < unknown.size(); ++j) theta(static_cast<Eigen::Index>(j)) = params.get(unknown[j]);
    return theta;
}

double ParamSignal::at(double t) const {
    if (const auto* c = std::get_if<ConstantSignal>(&signal_)) return c->value;
    const auto& s = std::get<SinusoidSignal>(signal_);
    return s.base * (1.0 - s.depth * std::cos(s.omega * t));
}

HivParamSignals HivParamSignals::constant(const HivParams& p) {
    HivParamSignals out;
    for (HivParam which : kAllHivParams) out[which] = ConstantSignal{p.get(which)};
    return out;
}

HivParams HivParamSignals::at(double t) const {
    HivParams p;
    for (HivParam which : kAllHivParams) p.set(which, (*this)[which].at(t));
    return p;
}

}  // namespace rhc
