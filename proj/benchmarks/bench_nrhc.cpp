#include <benchmark/benchmark.h>

#include "rhc/nrhc.hpp"
#include "rhc/sim.hpp"

namespace {

using namespace rhc;

SimState initial_state(const Scenario& s, double t) {
    SimState st;
    st.t = t;
    st.x = s.x0;
    st.y = s.y0;
    st.theta_hat = s.theta0;
    st.lambda = Vector::Zero(3);
    return st;
}

void BM_NrhcStep(benchmark::State& state) {
    const Scenario s = *find_preset("case1");
    const Problem p = compile(s);
    const SimState st = initial_state(s, 1.0);
    SweepWorkspace ws;
    for (auto _ : state) benchmark::DoNotOptimize(nrhc_step(st, p.nrhc, p.model, ws));
}
BENCHMARK(BM_NrhcStep);

void BM_ForwardSweep(benchmark::State& state) {
    Scenario s = *find_preset("case1");
    s.nrhc.N_tau = static_cast<int>(state.range(0));
    const Problem p = compile(s);
    const SimState st = initial_state(s, 1.0);
    SweepWorkspace ws;
    const double T = horizon(1.0, s.nrhc.T_f, s.nrhc.alpha).T;
    for (auto _ : state) {
        forward_sweep(st, T, p.nrhc, p.model, ws);
        benchmark::DoNotOptimize(ws.F);
    }
}
BENCHMARK(BM_ForwardSweep)->Arg(10)->Arg(20)->Arg(40);

void BM_BackwardSweep(benchmark::State& state) {
    const Scenario s = *find_preset("case1");
    const Problem p = compile(s);
    const SimState st = initial_state(s, 1.0);
    const Horizon h = horizon(1.0, s.nrhc.T_f, s.nrhc.alpha);
    SweepWorkspace ws;
    forward_sweep(st, h.T, p.nrhc, p.model, ws);
    for (auto _ : state) benchmark::DoNotOptimize(backward_sweep(ws, st, p.nrhc, p.model, h.dT_dt));
}
BENCHMARK(BM_BackwardSweep);

// One simulated day of the closed loop (100 sampling instants).
void BM_CaseOneFirstDay(benchmark::State& state) {
    Scenario s = *find_preset("case1");
    s.duration = 1.0;
    const Problem p = compile(s);
    for (auto _ : state) benchmark::DoNotOptimize(simulate(p));
}
BENCHMARK(BM_CaseOneFirstDay)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
