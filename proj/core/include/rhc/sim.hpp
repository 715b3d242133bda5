#pragma once

// Closed-loop drive/response simulation.
//
// Per sampling instant, in this order:
//   (a) nrhc_step produces u and advances lambda,
//   (b) the response y advances one t_s step under g(y) + D(y) theta_hat + u,
//   (c) the drive x advances one t_s step with the true parameters at the step start,
//   (d) theta_hat advances one t_s step of the update law with e and D(y) frozen
//       at the step start,
//   (e) a log row is appended.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rhc/estimator.hpp"
#include "rhc/model.hpp"
#include "rhc/nrhc.hpp"
#include "rhc/sim_state.hpp"

namespace rhc {

using DriveRhs = std::function<Vector(double t, const Vector& x)>;
using EstimatorLaw = std::function<Vector(const Matrix& D_y, const Vector& e)>;

/// Recorded drive trajectory replacing the internal drive simulation.
struct MeasurementTable {
    std::vector<double> t;
    std::vector<Vector> x;
};

/// Reads a header line `t,x1,...,xn` followed by one row per sampling
/// instant starting at t = 0. Row spacing must equal t_s within 1e-9.
/// Throws ConfigError naming the path on any violation.
[[nodiscard]] MeasurementTable load_measurements(const std::string& path, int n, double t_s);

/// Model-agnostic closed-loop problem.
struct Problem {
    std::string name;
    ModelSpec model;
    DriveRhs drive;
    std::function<Vector(double t)> theta_true;  ///< optional, logged when present
    Vector x0;
    Vector y0;
    Vector theta0;
    Vector lambda0;  ///< empty means zero
    NrhcConfig nrhc;
    EstimatorConfig estimator;
    EstimatorLaw law;  ///< empty means estimator_rhs
    double duration = 0.0;
    std::optional<MeasurementTable> measurements;
};

struct LogRow {
    double t = 0.0;
    Vector x;
    Vector y;
    double e_norm = 0.0;
    Vector u;
    Vector theta_hat;
    Vector theta_true;
    double F_norm = 0.0;
    double J = 0.0;
    double pe = 0.0;
};

struct TrajectoryLog {
    int n = 0;
    int p = 0;
    std::vector<std::string> param_names;
    std::vector<LogRow> rows;
    /// Sampling instants (after the first day) at which the 10-step moving
    /// average of the horizon cost increased.
    std::size_t cost_monitor_violations = 0;
};

struct RunFailure {
    enum class Kind { Divergence, NonFinite };
    Kind kind = Kind::NonFinite;
    double time = 0.0;
    std::string message;
};

struct RunResult {
    TrajectoryLog log;  ///< rows up to the failure when `failure` is set
    std::optional<RunFailure> failure;

    [[nodiscard]] bool ok() const { return !failure.has_value(); }
};

/// Called once per sampling instant with the pre-step state and the solve that
/// produced the step's control.
using StepObserver =
    std::function<void(const SimState& state, const NrhcStepResult& step, const SweepWorkspace& ws)>;

/// Number of sampling instants after t = 0: floor(duration / t_s) with a
/// small tolerance for representation error.
[[nodiscard]] std::size_t step_count(double duration, double t_s);

[[nodiscard]] RunResult simulate(const Problem& problem, const StepObserver& observer = {});

// ---------------------------------------------------------------------------
// HIV scenarios
// ---------------------------------------------------------------------------

struct OutputPaths {
    std::string csv;
    std::string svg;  ///< stem; figures are written as <stem>_<group>.svg
};

struct Scenario {
    std::string name;
    HivParamSignals truth;
    UnknownSet unknown;
    Vector x0;
    Vector y0;
    Vector theta0;
    NrhcConfig nrhc;
    EstimatorConfig estimator;
    double duration = 0.0;
    std::string measurements;  ///< optional path to a recorded drive trajectory
    OutputPaths output;

    /// Throws ConfigError naming the offending key.
    void validate() const;
};

[[nodiscard]] Problem compile(const Scenario& scenario);

[[nodiscard]] RunResult run_scenario(const Scenario& scenario, const StepObserver& observer = {});

/// case1 (constant parameters, 100 days) and case2 (sinusoidal s, 1000 days).
[[nodiscard]] std::vector<Scenario> builtin_scenarios();
[[nodiscard]] std::optional<Scenario> find_preset(const std::string& name);

}  // namespace rhc
