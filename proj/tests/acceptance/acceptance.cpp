// Acceptance criteria, one line per criterion. Exit status is non-zero if any
// criterion fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hiv_fixtures.hpp"
#include "rhc/commands.hpp"
#include "rhc/integrate.hpp"
#include "rhc/nrhc.hpp"
#include "rhc/oracle.hpp"
#include "rhc/sim.hpp"
#include "scratch_dir.hpp"

namespace {

using namespace rhc;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::string aborted(const RunResult& r) {
    return "run aborted at t = " + fmt("%.2f", r.failure->time) + " d (" + r.failure->message + ")";
}

/// Case-1 run shared by several criteria, with the per-step artefacts they need.
struct CaseOneRecord {
    RunResult run;
    double worst_asymmetry = 0.0;
    std::size_t stored_S = 0;
    std::vector<Outcome> shooting;  // one per snapshot
};

const std::vector<double> kShootingTimes{2.0, 5.0, 10.0, 20.0, 50.0};

CaseOneRecord record_case1() {
    const Scenario scenario = testing::preset("case1");
    const Problem problem = compile(scenario);
    CaseOneRecord rec;
    rec.shooting.assign(kShootingTimes.size(), Outcome{false, "snapshot not reached"});

    rec.run = simulate(problem, [&](const SimState& st, const NrhcStepResult&, const SweepWorkspace& ws) {
        for (const Matrix& S : ws.S) {
            rec.worst_asymmetry =
                std::max(rec.worst_asymmetry, (S - S.transpose()).cwiseAbs().maxCoeff() / (1.0 + S.norm()));
            ++rec.stored_S;
        }
        for (std::size_t k = 0; k < kShootingTimes.size(); ++k) {
            if (std::abs(st.t - kShootingTimes[k]) > 0.5 * problem.nrhc.t_s) continue;
            const ShootingResult shot =
                shoot_tpbvp(st.y, st.theta_hat, st.x, ws.horizon, problem.nrhc, problem.model, st.lambda);
            const double gap = (shot.lambda0 - st.lambda).norm();
            const double tol = std::max(1e-3, 1e-2 * st.lambda.norm());
            rec.shooting[k] = {shot.converged && gap <= tol,
                               std::string(shot.converged ? "converged" : "not converged") + ", gap " +
                                   fmt("%.2e", gap) + " (tol " + fmt("%.2e", tol) + ")"};
        }
    });
    return rec;
}

Outcome case1_reproduction(const CaseOneRecord& rec) {
    if (!rec.run.ok()) return {false, aborted(rec.run)};
    const auto& rows = rec.run.log.rows;
    const Vector truth{{36.0, 0.5, 500.0}};
    double worst = 0.0;
    double e20 = NAN;
    for (const LogRow& row : rows) {
        if (std::abs(row.t - 20.0) < 1e-9) e20 = row.e_norm;
        if (row.t < 20.0 - 1e-9) continue;
        worst = std::max(worst, ((row.theta_hat - truth).array().abs() / truth.array()).maxCoeff());
    }
    const double e_ratio = e20 / rows.front().e_norm;
    return {worst <= 0.05 && e_ratio <= 0.01,
            "max rel estimate error on [20,100] " + fmt("%.3e", worst) + ", e(20)/e(0) " + fmt("%.3e", e_ratio)};
}

Outcome case2_reproduction() {
    const RunResult r = run_scenario(testing::preset("case2"));
    if (!r.ok()) return {false, aborted(r)};
    constexpr double kPi = 3.14159265358979323846;
    double worst_s_excess = -INFINITY;
    double worst_rest = 0.0;
    for (const LogRow& row : r.log.rows) {
        if (row.t < 100.0 - 1e-9) continue;
        const double s = 36.0 * (1.0 - 0.9 * std::cos(kPi * row.t / 1000.0));
        worst_s_excess = std::max(worst_s_excess, std::abs(row.theta_hat(0) - s) - (0.1 * s + 0.5));
        worst_rest = std::max({worst_rest, std::abs(row.theta_hat(1) - 0.5) / 0.5,
                               std::abs(row.theta_hat(2) - 500.0) / 500.0});
    }
    return {worst_s_excess <= 0.0 && worst_rest <= 0.05,
            "s tracking margin " + fmt("%.3e", -worst_s_excess) + ", max rel mu1/k error " + fmt("%.3e", worst_rest)};
}

Outcome shooting_equivalence(const CaseOneRecord& rec) {
    bool all = true;
    std::string detail;
    for (std::size_t k = 0; k < kShootingTimes.size(); ++k) {
        all = all && rec.shooting[k].pass;
        detail += (k ? "; " : "") + std::string("t=") + fmt("%g", kShootingTimes[k]) + ": " + rec.shooting[k].detail;
    }
    return {all, detail};
}

Outcome residual_decay(const CaseOneRecord& rec) {
    const auto& rows = rec.run.log.rows;
    if (rows.empty()) return {false, "no samples"};
    double peak = 0.0;
    for (const LogRow& row : rows) peak = std::max(peak, row.F_norm);

    std::deque<double> window;
    double sum = 0.0;
    double previous = INFINITY;
    std::size_t increases = 0;
    double first_increase = NAN;
    for (const LogRow& row : rows) {
        window.push_back(row.F_norm);
        sum += row.F_norm;
        if (window.size() > 10) {
            sum -= window.front();
            window.pop_front();
        }
        if (window.size() < 10) continue;
        const double avg = sum / 10.0;
        if (row.t > 1.0 + 1e-9) {
            if (avg > previous) {
                if (increases++ == 0) first_increase = row.t;
            }
        }
        previous = avg;
    }

    std::string detail = std::to_string(increases) + " moving-average increases after day 1";
    if (increases) detail += " (first at t = " + fmt("%.2f", first_increase) + ")";
    if (!rec.run.ok() || rows.back().t < 20.0 - 1e-9) return {false, detail + "; " + aborted(rec.run)};

    const auto at20 = std::find_if(rows.begin(), rows.end(), [](const LogRow& r) { return std::abs(r.t - 20.0) < 1e-9; });
    const double ratio = at20->F_norm / peak;
    return {increases == 0 && ratio <= 1e-4, detail + "; |F(20)|/peak " + fmt("%.3e", ratio)};
}

Outcome derivative_certification() {
    const Scenario s = testing::preset("case1");
    const Problem p = compile(s);
    std::mt19937_64 rng(20240601);
    const auto samples = hiv_gradient_samples(hiv_theta(s.unknown, s.truth.at(0.0)), 100, rng);
    const GradientCertification c = certify_gradients(p.model, p.nrhc, samples);
    return {c.samples == 100 && c.max_rel_H_y <= 1e-6 && c.max_rel_f_y <= 1e-6 && c.max_rel_H_yy <= 1e-4,
            "H_y " + fmt("%.2e", c.max_rel_H_y) + ", f_y " + fmt("%.2e", c.max_rel_f_y) + ", H_yy " +
                fmt("%.2e", c.max_rel_H_yy) + " over " + std::to_string(c.samples) + " samples"};
}

Outcome riccati_structure(const CaseOneRecord& rec) {
    const int n = 3;
    const int N = 20;
    const double T = 0.1;
    Matrix K(n, n);
    K << 2.0, 0.5, -1.0, 0.5, 3.0, 0.25, -1.0, 0.25, 1.0;
    SweepWorkspace ws;
    ws.resize(N, n);
    for (int i = 0; i <= N; ++i) ws.tau[static_cast<std::size_t>(i)] = T * i / N;
    riccati_sweep(std::vector<Matrix>(N + 1, Matrix::Zero(n, n)), Matrix::Zero(n, n),
                  std::vector<Matrix>(N + 1, K), Vector::Zero(n), StepperKind::RungeKutta4, ws);
    double synthetic = 0.0;
    for (std::size_t i = 0; i < ws.nodes(); ++i) {
        synthetic = std::max(synthetic, (ws.S[i] - K * (T - ws.tau[i])).cwiseAbs().maxCoeff());
    }

    const bool symmetric = rec.stored_S > 0 && rec.worst_asymmetry <= 1e-9;
    const bool exact = synthetic <= 64 * std::numeric_limits<double>::epsilon() * K.cwiseAbs().maxCoeff() * T;
    std::string detail = "max asymmetry/(1+|S|) " + fmt("%.2e", rec.worst_asymmetry) + " over " +
                         std::to_string(rec.stored_S) + " stored S; synthetic max error " + fmt("%.2e", synthetic);
    if (!rec.run.ok()) detail += "; not a full run: " + aborted(rec.run);
    return {symmetric && exact && rec.run.ok(), detail};
}

Outcome equilibrium_fixed_point() {
    const RunResult r = run_scenario(testing::equilibrium_scenario(10.0));
    if (!r.ok()) return {false, aborted(r)};
    double e_max = 0.0;
    double drift = 0.0;
    const Vector theta0 = r.log.rows.front().theta_hat;
    for (const LogRow& row : r.log.rows) {
        e_max = std::max(e_max, row.e_norm);
        drift = std::max(drift, (row.theta_hat - theta0).norm() / theta0.norm());
    }
    return {e_max <= 1e-6 && drift <= 1e-6 && r.log.rows.back().t >= 10.0 - 1e-9,
            "max |e| " + fmt("%.2e", e_max) + ", rel estimate drift " + fmt("%.2e", drift)};
}

Outcome integrator_orders() {
    const OdeRhs decay = [](double, const Vector& y) { return Vector(-y); };
    const auto error = [&](StepperKind kind, double h) {
        Vector y = Vector::Ones(1);
        const int steps = static_cast<int>(std::lround(1.0 / h));
        for (int i = 0; i < steps; ++i) y = step(decay, i * h, y, h, kind);
        return std::abs(y(0) - std::exp(-1.0));
    };
    const double euler = error(StepperKind::ForwardEuler, 0.1) / error(StepperKind::ForwardEuler, 0.05);
    const double rk4 = error(StepperKind::RungeKutta4, 0.1) / error(StepperKind::RungeKutta4, 0.05);
    return {euler >= 1.8 && euler <= 2.2 && rk4 >= 14.0 && rk4 <= 18.0,
            "Euler ratio " + fmt("%.4f", euler) + ", RK4 ratio " + fmt("%.4f", rk4)};
}

Outcome determinism() {
    testing::ScratchDir dir;
    std::ostringstream sink;
    const auto run_once = [&](const std::string& stem) {
        cli::RunArgs args;
        args.target = "case1";
        args.out_csv = dir.file(stem + ".csv");
        args.out_svg = dir.file(stem);
        return cli::cmd_run(args, sink, sink);
    };
    const int a = run_once("first");
    const int b = run_once("second");
    const std::string first = testing::slurp(dir.file("first.csv"));
    const std::string second = testing::slurp(dir.file("second.csv"));
    const bool same = !first.empty() && first == second;
    return {same && a == b, std::to_string(first.size()) + " bytes, exit codes " + std::to_string(a) + "/" +
                                std::to_string(b) + (same ? ", identical" : ", DIFFERENT")};
}

Outcome pe_monitor(const CaseOneRecord& rec) {
    double min_pe = INFINITY;
    std::size_t checked = 0;
    for (const LogRow& row : rec.run.log.rows) {
        if (row.t <= 10.0) continue;
        min_pe = std::min(min_pe, row.pe);
        ++checked;
    }
    if (!rec.run.ok()) return {false, "no samples after day 10; " + aborted(rec.run)};
    return {checked > 0 && min_pe > 0.0, "min PE after day 10 " + fmt("%.3e", min_pe)};
}

}  // namespace

int main() {
    const CaseOneRecord case1 = record_case1();

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"Case-1 reproduction", [&] { return case1_reproduction(case1); }},
        {"Case-2 reproduction", [] { return case2_reproduction(); }},
        {"continuation vs shooting", [&] { return shooting_equivalence(case1); }},
        {"residual decay", [&] { return residual_decay(case1); }},
        {"derivative certification", [] { return derivative_certification(); }},
        {"Riccati structure", [&] { return riccati_structure(case1); }},
        {"equilibrium fixed point", [] { return equilibrium_fixed_point(); }},
        {"integrator orders", [] { return integrator_orders(); }},
        {"determinism", [] { return determinism(); }},
        {"PE monitor", [&] { return pe_monitor(case1); }},
    };

    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += o.pass ? 0 : 1;
        std::printf("[%s] %2zu %-26s %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    o.detail.c_str());
    }
    std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
    return failed == 0 ? 0 : 1;
}
