#include "rhc/commands.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

#include "rhc/config.hpp"
#include "rhc/csv.hpp"
#include "rhc/errors.hpp"
#include "rhc/oracle.hpp"
#include "rhc/svg_plot.hpp"

namespace rhc::cli {

int cmd_run(const RunArgs& args, std::ostream& out, std::ostream& err) {
    Scenario scenario;
    RunResult result;
    try {
        scenario = load_scenario(args.target, args.overrides);
        if (args.out_csv) scenario.output.csv = *args.out_csv;
        if (args.out_svg) scenario.output.svg = *args.out_svg;
        result = run_scenario(scenario);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    }

    try {
        write_csv(result.log, scenario.output.csv);
        if (!scenario.output.svg.empty()) write_figures(result.log, scenario.output.svg);
    } catch (const std::exception& e) {
        err << "output error: " << e.what() << '\n';
        return kExitConfig;
    }

    out << scenario.name << ": " << result.log.rows.size() << " rows written to " << scenario.output.csv << '\n';
    if (!result.log.rows.empty()) {
        const LogRow& last = result.log.rows.back();
        out << "  t = " << last.t << "  |e| = " << last.e_norm << "  theta_hat = ";
        for (Eigen::Index j = 0; j < last.theta_hat.size(); ++j) {
            out << (j ? ", " : "") << result.log.param_names[static_cast<std::size_t>(j)] << "=" << last.theta_hat(j);
        }
        out << '\n';
    }
    if (!result.ok()) {
        err << "numerical divergence: " << result.failure->message << " (t = " << result.failure->time << ")\n";
        return kExitDivergence;
    }
    return kExitOk;
}

namespace {

struct CheckRow {
    std::string name;
    bool pass = false;
    std::string detail;
};

std::string sci(double v) {
    std::ostringstream s;
    s.imbue(std::locale::classic());
    s << std::scientific << std::setprecision(2) << v;
    return s.str();
}

double asymmetry(const Matrix& S) {
    const double scale = 1.0 + S.cwiseAbs().maxCoeff();
    return (S - S.transpose()).cwiseAbs().maxCoeff() / scale;
}

}  // namespace

int cmd_verify(const std::string& target, const VerifyOptions& options, std::ostream& out, std::ostream& err) {
    Scenario scenario;
    Problem problem;
    try {
        scenario = load_scenario(target);
        problem = compile(scenario);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
    if (options.law) problem.law = options.law;
    const EstimatorLaw law = problem.law ? problem.law : EstimatorLaw(estimator_rhs);

    std::vector<CheckRow> rows;

    // Closed-loop run with snapshots and a symmetry scan of every S node.
    const double t_s = problem.nrhc.t_s;
    const std::vector<double> fractions{0.02, 0.05, 0.1, 0.2, 0.5};
    std::vector<std::size_t> snapshot_steps;
    for (double f : fractions) snapshot_steps.push_back(static_cast<std::size_t>(std::llround(f * problem.duration / t_s)));
    std::vector<std::optional<SimState>> snapshots(fractions.size());
    double worst_asymmetry = 0.0;

    const RunResult run = simulate(problem, [&](const SimState& s, const NrhcStepResult&, const SweepWorkspace& ws) {
        const auto step = static_cast<std::size_t>(std::llround(s.t / t_s));
        for (std::size_t k = 0; k < snapshot_steps.size(); ++k) {
            if (snapshot_steps[k] == step) snapshots[k] = s;
        }
        for (const auto& S : ws.S) worst_asymmetry = std::max(worst_asymmetry, asymmetry(S));
    });

    rows.push_back({"closed-loop run", run.ok(),
                    run.ok() ? std::to_string(run.log.rows.size()) + " samples"
                             : "aborted at t = " + std::to_string(run.failure->time) + ": " + run.failure->message});

    for (std::size_t k = 0; k < snapshots.size(); ++k) {
        const double t_snap = static_cast<double>(snapshot_steps[k]) * t_s;
        CheckRow row{"shooting agreement t=" + format_double(t_snap), false, ""};
        if (!snapshots[k]) {
            row.detail = "snapshot not reached";
        } else {
            const SimState& s = *snapshots[k];
            const double T = horizon(s.t, problem.nrhc.T_f, problem.nrhc.alpha).T;
            const ShootingResult shot =
                shoot_tpbvp(s.y, s.theta_hat, s.x, T, problem.nrhc, problem.model, s.lambda);
            const double gap = (shot.lambda0 - s.lambda).norm();
            const double tol = std::max(1e-3, 1e-2 * s.lambda.norm());
            row.pass = shot.converged && gap <= tol;
            row.detail = std::string(shot.converged ? "converged" : "NOT converged") + ", |dlambda| = " + sci(gap) +
                         " (tol " + sci(tol) + ")";
        }
        rows.push_back(row);
    }

    rows.push_back({"Riccati symmetry", run.log.rows.size() > 0 && worst_asymmetry <= 1e-9,
                    "max asymmetry / (1 + |S|) = " + sci(worst_asymmetry)});

    {
        std::mt19937_64 rng(20240601);
        const Vector theta_scale = problem.theta_true ? problem.theta_true(0.0) : problem.theta0;
        const auto samples = hiv_gradient_samples(theta_scale, 100, rng);
        const GradientCertification cert = certify_gradients(problem.model, problem.nrhc, samples);
        rows.push_back({"gradient H_y", cert.max_rel_H_y <= 1e-6, "max rel err " + sci(cert.max_rel_H_y)});
        rows.push_back({"gradient f_y", cert.max_rel_f_y <= 1e-6, "max rel err " + sci(cert.max_rel_f_y)});
        rows.push_back({"Hessian H_yy", cert.max_rel_H_yy <= 1e-4, "max rel err " + sci(cert.max_rel_H_yy)});
    }

    {
        const HivParams truth = scenario.truth.at(0.0);
        const SteadyState eq = steady_state(truth);
        const double residual = hiv_rhs(eq.point, truth).norm() / std::max(1.0, eq.point.norm());
        rows.push_back({"steady-state residual", residual <= 1e-9,
                        "relative residual " + sci(residual) + (eq.infected_free ? " (infected-free regime)" : "")});
    }

    {
        // theta_err' (update) + e' D theta_err must cancel for a Lyapunov-consistent law.
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        double worst = 0.0;
        for (int k = 0; k < 100; ++k) {
            Vector y(problem.model.n);
            Vector e(problem.model.n);
            Vector theta_err(problem.model.p);
            for (Eigen::Index i = 0; i < y.size(); ++i) {
                y(i) = 1000.0 * (1.0 + unit(rng));
                e(i) = 100.0 * unit(rng);
            }
            for (Eigen::Index i = 0; i < theta_err.size(); ++i) theta_err(i) = 10.0 * unit(rng);
            const Matrix D = problem.model.regressor(y);
            const double cross = e.dot(D * theta_err);
            const double residual = theta_err.dot(law(D, e)) + cross;
            worst = std::max(worst, std::abs(residual) / (std::abs(cross) + 1e-300));
        }
        rows.push_back({"estimator cross-term cancellation", worst <= 1e-9, "max relative residual " + sci(worst)});
    }

    bool all = true;
    out << "verify " << scenario.name << '\n';
    for (const auto& r : rows) {
        out << "  [" << (r.pass ? "PASS" : "FAIL") << "] " << std::left << std::setw(36) << r.name << r.detail << '\n';
        all = all && r.pass;
    }
    out << (all ? "all checks passed" : "some checks FAILED") << '\n';
    return all ? kExitOk : kExitCheckFailed;
}

int cmd_list_presets(std::ostream& out) {
    for (const auto& s : builtin_scenarios()) {
        out << s.name << "  duration " << s.duration << " days, unknown {";
        for (std::size_t i = 0; i < s.unknown.size(); ++i) out << (i ? "," : "") << to_string(s.unknown[i]);
        out << "}, s(t) " << (s.truth[HivParam::s].is_constant() ? "constant" : "sinusoidal") << '\n';
    }
    return kExitOk;
}

}  // namespace rhc::cli
