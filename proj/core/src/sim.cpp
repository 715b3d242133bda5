#include "rhc/sim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "log.hpp"
#include "rhc/errors.hpp"

namespace rhc {

MeasurementTable load_measurements(const std::string& path, int n, double t_s) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path, "cannot open measurement table");

    std::string line;
    if (!std::getline(in, line)) throw ConfigError(path, "measurement table is empty");
    std::string expected = "t";
    for (int i = 1; i <= n; ++i) expected += ",x" + std::to_string(i);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != expected) throw ConfigError(path, "header must be '" + expected + "'");

    MeasurementTable table;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream fields(line);
        fields.imbue(std::locale::classic());
        std::vector<double> values;
        std::string cell;
        while (std::getline(fields, cell, ',')) {
            std::istringstream parse(cell);
            parse.imbue(std::locale::classic());
            double v = 0.0;
            if (!(parse >> v) || !std::isfinite(v)) {
                throw ConfigError(path, "row " + std::to_string(row + 1) + ": malformed number '" + cell + "'");
            }
            values.push_back(v);
        }
        if (values.size() != static_cast<std::size_t>(n) + 1) {
            throw ConfigError(path, "row " + std::to_string(row + 1) + ": expected " + std::to_string(n + 1) +
                                        " columns");
        }
        const double expected_t = static_cast<double>(row) * t_s;
        if (std::abs(values[0] - expected_t) > 1e-9) {
            throw ConfigError(path, "row " + std::to_string(row + 1) + ": time " + std::to_string(values[0]) +
                                        " breaks the sampling cadence");
        }
        table.t.push_back(values[0]);
        table.x.emplace_back(Eigen::Map<const Vector>(values.data() + 1, n));
        ++row;
    }
    return table;
}

std::size_t step_count(double duration, double t_s) {
    return static_cast<std::size_t>(std::floor(duration / t_s + 1e-9));
}

namespace {

// Moving averages of the horizon cost over the last `width` samples.
class CostMonitor {
public:
    explicit CostMonitor(std::size_t width) : width_(width) {}

    /// Returns true when the moving average rose relative to the previous one.
    bool push(double value) {
        window_.push_back(value);
        sum_ += value;
        if (window_.size() > width_) {
            sum_ -= window_.front();
            window_.pop_front();
        }
        if (window_.size() < width_) return false;
        const double avg = sum_ / static_cast<double>(width_);
        const bool rose = have_previous_ && avg > previous_ * (1.0 + 1e-12) + 1e-300;
        previous_ = avg;
        have_previous_ = true;
        return rose;
    }

private:
    std::size_t width_;
    std::deque<double> window_;
    double sum_ = 0.0;
    double previous_ = 0.0;
    bool have_previous_ = false;
};

constexpr double kMonitorTransient = 1.0;  // days

}  // namespace

RunResult simulate(const Problem& problem, const StepObserver& observer) {
    const ModelSpec& model = problem.model;
    const NrhcConfig& cfg = problem.nrhc;
    const int n = model.n;
    const int p = model.p;

    cfg.validate(n);
    const EstimatorLaw law = problem.law ? problem.law : EstimatorLaw(estimator_rhs);

    RunResult result;
    TrajectoryLog& log = result.log;
    log.n = n;
    log.p = p;
    log.param_names = model.param_names;

    const std::size_t steps = step_count(problem.duration, cfg.t_s);
    log.rows.reserve(steps + 1);

    if (problem.measurements && problem.measurements->x.size() < steps + 1) {
        throw ConfigError("run.measurements", "table has " + std::to_string(problem.measurements->x.size()) +
                                                  " rows, the run needs " + std::to_string(steps + 1));
    }

    SimState state;
    state.t = 0.0;
    state.x = problem.measurements ? problem.measurements->x.front() : problem.x0;
    state.y = problem.y0;
    state.lambda = problem.lambda0.size() == n ? problem.lambda0 : Vector::Zero(n);
    state.theta_hat = problem.theta0;

    PeWindow window(problem.estimator.pe_window);
    SweepWorkspace ws;
    ws.resize(cfg.N_tau, n);
    CostMonitor monitor(10);

    auto& lg = detail::logger();
    lg.info("{}: {} samples, t_s = {}, N_tau = {}", problem.name, steps, cfg.t_s, cfg.N_tau);

    for (std::size_t i = 0;; ++i) {
        state.t = static_cast<double>(i) * cfg.t_s;
        try {
            // (a) one receding-horizon solve
            const NrhcStepResult solve = nrhc_step(state, cfg, model, ws);
            if (observer) observer(state, solve, ws);

            const Matrix D_y = model.regressor(state.y);
            const Vector e = state.error();
            window.push(state.t, D_y);

            LogRow row;
            row.t = state.t;
            row.x = state.x;
            row.y = state.y;
            row.e_norm = e.norm();
            row.u = solve.u;
            row.theta_hat = state.theta_hat;
            row.theta_true = problem.theta_true ? problem.theta_true(state.t)
                                                : Vector::Constant(p, std::numeric_limits<double>::quiet_NaN());
            row.F_norm = solve.F_norm;
            row.J = solve.cost;
            row.pe = window.metric().value;
            log.rows.push_back(std::move(row));

            if (monitor.push(solve.cost) && state.t > kMonitorTransient) {
                if (log.cost_monitor_violations == 0) {
                    lg.warn("{}: horizon cost moving average increased at t = {}", problem.name, state.t);
                }
                ++log.cost_monitor_violations;
            }

            if (i == steps) break;

            const double t = state.t;
            const double h = cfg.t_s;
            const Vector theta_frozen = state.theta_hat;

            // (b) response under the held control and estimate
            const OdeRhs response = [&](double, const Vector& y) {
                return Vector(model.rhs(y, theta_frozen) + solve.u);
            };
            Vector y_next = step(response, t, state.y, h, cfg.stepper);

            // (c) drive with the true parameters at the step start
            Vector x_next;
            if (problem.measurements) {
                x_next = problem.measurements->x[i + 1];
            } else {
                const OdeRhs drive = [&](double, const Vector& x) { return problem.drive(t, x); };
                x_next = step(drive, t, state.x, h, cfg.stepper);
            }

            // (d) estimate with e and D(y) frozen at the step start
            const Vector rate = problem.estimator.gain * law(D_y, e);
            const OdeRhs estimator = [&](double, const Vector&) { return rate; };
            Vector theta_next = step(estimator, t, state.theta_hat, h, cfg.stepper);

            state.y = std::move(y_next);
            state.x = std::move(x_next);
            state.theta_hat = std::move(theta_next);
            state.lambda = solve.lambda_next;
        } catch (const DivergenceError& err) {
            result.failure = RunFailure{RunFailure::Kind::Divergence, state.t, err.what()};
            break;
        } catch (const NumericalError& err) {
            result.failure = RunFailure{RunFailure::Kind::NonFinite, state.t, err.what()};
            break;
        }
    }

    if (result.failure) {
        lg.error("{}: run aborted at t = {}: {}", problem.name, result.failure->time, result.failure->message);
    }
    if (log.cost_monitor_violations > 0) {
        lg.warn("{}: horizon cost moving average increased at {} sampling instants after t = {}", problem.name,
                log.cost_monitor_violations, kMonitorTransient);
    }
    return result;
}

// ---------------------------------------------------------------------------

void Scenario::validate() const {
    if (unknown.empty()) throw ConfigError("model.unknown", "at least one parameter must be unknown");
    for (std::size_t i = 0; i < unknown.size(); ++i) {
        for (std::size_t j = i + 1; j < unknown.size(); ++j) {
            if (unknown[i] == unknown[j]) throw ConfigError("model.unknown", "duplicate parameter");
        }
    }
    for (HivParam which : kAllHivParams) {
        const std::string key = "model." + std::string(to_string(which));
        const ParamSignal& sig = truth[which];
        if (const auto* s = std::get_if<SinusoidSignal>(&sig.variant())) {
            if (!std::isfinite(s->base) || !std::isfinite(s->depth) || !std::isfinite(s->omega)) {
                throw ConfigError(key, "sinusoid fields must be finite");
            }
        } else if (!std::isfinite(sig.at(0.0))) {
            throw ConfigError(key, "must be finite");
        }
        const bool is_unknown = std::find(unknown.begin(), unknown.end(), which) != unknown.end();
        if (!is_unknown && !sig.is_constant()) {
            throw ConfigError(key, "a known parameter must be constant");
        }
    }
    try {
        truth.at(0.0).validate();
    } catch (const std::invalid_argument& err) {
        throw ConfigError("model", err.what());
    }
    if (x0.size() != 3 || !x0.allFinite()) throw ConfigError("init.x0", "expected 3 finite values");
    if (y0.size() != 3 || !y0.allFinite()) throw ConfigError("init.y0", "expected 3 finite values");
    if (theta0.size() != static_cast<Eigen::Index>(unknown.size()) || !theta0.allFinite()) {
        throw ConfigError("init.theta0", "expected one finite value per unknown parameter");
    }
    if (!(duration > 0.0) || !std::isfinite(duration)) throw ConfigError("run.duration", "must be positive");
    if (!(estimator.gain > 0.0) || !std::isfinite(estimator.gain)) {
        throw ConfigError("estimator.gain", "must be positive");
    }
    if (!(estimator.pe_window > 0.0) || !std::isfinite(estimator.pe_window)) {
        throw ConfigError("estimator.pe_window", "must be positive");
    }
    nrhc.validate(3);
}

Problem compile(const Scenario& scenario) {
    scenario.validate();

    Problem problem;
    problem.name = scenario.name;
    const HivParams known = scenario.truth.at(0.0);
    problem.model = hiv_split(scenario.unknown, known);

    const HivParamSignals truth = scenario.truth;
    const UnknownSet unknown = scenario.unknown;
    problem.drive = [truth](double t, const Vector& x) { return hiv_rhs(x, truth.at(t)); };
    problem.theta_true = [truth, unknown](double t) { return hiv_theta(unknown, truth.at(t)); };

    problem.x0 = scenario.x0;
    problem.y0 = scenario.y0;
    problem.theta0 = scenario.theta0;
    problem.nrhc = scenario.nrhc;
    problem.estimator = scenario.estimator;
    problem.duration = scenario.duration;
    if (!scenario.measurements.empty()) {
        problem.measurements = load_measurements(scenario.measurements, 3, scenario.nrhc.t_s);
    }
    return problem;
}

RunResult run_scenario(const Scenario& scenario, const StepObserver& observer) {
    return simulate(compile(scenario), observer);
}

std::vector<Scenario> builtin_scenarios() {
    const HivParams truth{};  // s=36, d=0.108, beta=9e-5, mu1=0.5, k=500, mu2=3

    Scenario case1;
    case1.name = "case1";
    case1.truth = HivParamSignals::constant(truth);
    case1.unknown = {HivParam::s, HivParam::mu1, HivParam::k};
    case1.x0 = Vector{{1000.0, 10.0, 1000.0}};
    case1.y0 = Vector{{200.0, 50.0, 20000.0}};
    case1.theta0 = Vector{{1.0, 1.0, 1.0}};
    case1.nrhc = NrhcConfig::identity_weights(3);
    case1.nrhc.T_f = 0.1;
    case1.nrhc.alpha = 0.01;
    case1.nrhc.t_s = 0.01;
    case1.nrhc.N_tau = 20;
    case1.duration = 100.0;
    case1.output = {"case1.csv", "case1"};

    Scenario case2 = case1;
    case2.name = "case2";
    case2.truth[HivParam::s] = SinusoidSignal{36.0, 0.9, std::numbers::pi / 1000.0};
    case2.duration = 1000.0;
    case2.output = {"case2.csv", "case2"};

    return {case1, case2};
}

std::optional<Scenario> find_preset(const std::string& name) {
    for (auto& s : builtin_scenarios()) {
        if (s.name == name) return s;
    }
    return std::nullopt;
}

}  // namespace rhc
