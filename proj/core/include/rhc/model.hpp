#pragma once

// Drive/response system interface and the HIV / CD4+ T cell model.
//
// A model is split as  f(y, theta) = g(y) + D(y) * theta, where theta holds
// the parameters that are being estimated. The response system adds an
// additive control input u, so f_u = I.

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rhc/types.hpp"

namespace rhc {

struct ModelSpec {
    int n = 0;  ///< state dimension
    int p = 0;  ///< parameter dimension

    std::function<Vector(const Vector& y)> g;
    std::function<Matrix(const Vector& y)> regressor;  ///< D(y), n x p
    std::function<Matrix(const Vector& y)> jac_g;
    /// d[D(y) theta]/dy
    std::function<Matrix(const Vector& y, const Vector& theta)> jac_d_theta;
    /// sum_i lambda_i * d^2 f_i / dy^2, symmetric.
    std::function<Matrix(const Vector& y, const Vector& theta, const Vector& lambda)> hess_contract;

    std::vector<std::string> param_names;

    /// g(y) + D(y) theta
    [[nodiscard]] Vector rhs(const Vector& y, const Vector& theta) const;
    /// jac_g(y) + jac_d_theta(y, theta)
    [[nodiscard]] Matrix jacobian(const Vector& y, const Vector& theta) const;
};

// ---------------------------------------------------------------------------
// HIV model
// ---------------------------------------------------------------------------

enum class HivParam { s = 0, d, beta, mu1, k, mu2 };

inline constexpr std::array<HivParam, 6> kAllHivParams{HivParam::s,   HivParam::d, HivParam::beta,
                                                        HivParam::mu1, HivParam::k, HivParam::mu2};

[[nodiscard]] std::string_view to_string(HivParam p);
/// Accepts s, d, beta, mu1, k, mu2.
[[nodiscard]] std::optional<HivParam> parse_hiv_param(std::string_view name);

struct HivParams {
    double s = 36.0;     ///< proliferation of uninfected cells, cells/mm^3/day
    double d = 0.108;    ///< death rate of uninfected cells, 1/day
    double beta = 9e-5;  ///< infection rate, mm^3/day
    double mu1 = 0.5;    ///< death rate of infected cells, 1/day
    double k = 500.0;    ///< virion production, virions/cell/day
    double mu2 = 3.0;    ///< virion clearance, 1/day

    [[nodiscard]] double get(HivParam which) const;
    void set(HivParam which, double value);
    /// Throws std::invalid_argument unless all six rates are strictly positive.
    void validate() const;
};

/// Right-hand side of the three-state HIV infection model.
[[nodiscard]] Vector hiv_rhs(const Vector& state, const HivParams& params);

using UnknownSet = std::vector<HivParam>;

/// Split the HIV model so that `unknown` become the estimated parameter vector
/// (in the order given); all other rates are baked into g with values from
/// `known`. Throws std::invalid_argument on an empty or repeated unknown set.
[[nodiscard]] ModelSpec hiv_split(const UnknownSet& unknown, const HivParams& known);

/// Full Jacobian d[g + D theta_hat]/dy for the split defined by `unknown`.
[[nodiscard]] Matrix hiv_jacobian(const Vector& state, const Vector& estimate,
                                  const UnknownSet& unknown, const HivParams& known);

/// Extract the true values of `unknown` from a parameter set.
[[nodiscard]] Vector hiv_theta(const UnknownSet& unknown, const HivParams& params);

// ---------------------------------------------------------------------------
// Parameter signals
// ---------------------------------------------------------------------------

struct ConstantSignal {
    double value = 0.0;
};

/// base * (1 - depth * cos(omega * t))
struct SinusoidSignal {
    double base = 0.0;
    double depth = 0.0;
    double omega = 0.0;
};

class ParamSignal {
public:
    ParamSignal() = default;
    ParamSignal(ConstantSignal c) : signal_(c) {}  // NOLINT(google-explicit-constructor)
    ParamSignal(SinusoidSignal s) : signal_(s) {}  // NOLINT(google-explicit-constructor)

    [[nodiscard]] double at(double t) const;
    [[nodiscard]] bool is_constant() const { return std::holds_alternative<ConstantSignal>(signal_); }
    [[nodiscard]] const std::variant<ConstantSignal, SinusoidSignal>& variant() const { return signal_; }

private:
    std::variant<ConstantSignal, SinusoidSignal> signal_{ConstantSignal{}};
};

/// One signal per HIV rate, indexed by HivParam.
struct HivParamSignals {
    std::array<ParamSignal, 6> signals{};

    [[nodiscard]] static HivParamSignals constant(const HivParams& p);
    [[nodiscard]] HivParams at(double t) const;
    [[nodiscard]] ParamSignal& operator[](HivParam which) { return signals[static_cast<int>(which)]; }
    [[nodiscard]] const ParamSignal& operator[](HivParam which) const {
        return signals[static_cast<int>(which)];
    }
};

}  // namespace rhc
