#include <benchmark/benchmark.h>

#include <cmath>

#include "nladv/diagnostics.hpp"
#include "nladv/kernel.hpp"
#include "nladv/solver.hpp"

using namespace nladv;

namespace {

Field bump_pair_total(const PeriodicGrid& g) {
    Field f(g);
    for (int i = 0; i < g.n_cells(); ++i) {
        const double x = g.center(i);
        f[i] = 0.1 + 0.08 * std::cos(x) + 0.05 * std::cos(3 * x + 0.4);
        f[i] = std::max(f[i], 0.0);
    }
    return f;
}

void BM_ConvolveSpectral(benchmark::State& state) {
    PeriodicGrid g(static_cast<int>(state.range(0)));
    PeriodizedKernel K = PeriodizedKernel::periodize(BaseKernel::gaussian(), g, 4);
    Field u = bump_pair_total(g);
    for (auto _ : state) benchmark::DoNotOptimize(K.convolve(u));
}
BENCHMARK(BM_ConvolveSpectral)->Arg(256)->Arg(1024)->Arg(4096);

void BM_ConvolveDirect(benchmark::State& state) {
    PeriodicGrid g(static_cast<int>(state.range(0)));
    PeriodizedKernel K = PeriodizedKernel::periodize(BaseKernel::gaussian(), g, 4);
    Field u = bump_pair_total(g);
    for (auto _ : state) benchmark::DoNotOptimize(K.convolve_direct(u));
}
BENCHMARK(BM_ConvolveDirect)->Arg(256)->Arg(1024);

void BM_InterfaceVelocities(benchmark::State& state) {
    PeriodicGrid g(static_cast<int>(state.range(0)));
    PeriodizedKernel K = PeriodizedKernel::periodize(BaseKernel::gaussian(), g, 4);
    Field u = bump_pair_total(g);
    for (auto _ : state) benchmark::DoNotOptimize(interface_velocities(K, u));
}
BENCHMARK(BM_InterfaceVelocities)->Arg(256)->Arg(1024);

void BM_SolverStep(benchmark::State& state) {
    PeriodicGrid g(static_cast<int>(state.range(0)));
    PeriodizedKernel K = PeriodizedKernel::periodize(BaseKernel::gaussian(), g, 4);
    SolverConfig cfg;
    cfg.reaction1 = ReactionModel::contact_inhibition(1.2, 1.0, 1.0);
    cfg.reaction2 = ReactionModel::logistic(1.2, 0.2);
    Field u1 = bump_pair_total(g);
    SimState s(u1, Field(g, 0.0));
    const double dt = 0.5 * stable_dt(s, K, cfg);
    for (auto _ : state) {
        SimState next = step(s, K, cfg, dt);
        benchmark::DoNotOptimize(next);
    }
}
BENCHMARK(BM_SolverStep)->Arg(256)->Arg(1024);

void BM_DiagnosticsCollect(benchmark::State& state) {
    PeriodicGrid g(static_cast<int>(state.range(0)));
    PeriodizedKernel K = PeriodizedKernel::periodize(BaseKernel::gaussian(), g, 4);
    DiagnosticsCollector coll(K, ReactionModel::contact_inhibition(1.2, 1.0, 1.0),
                              ReactionModel::logistic(1.2, 0.2));
    SimState s(bump_pair_total(g), Field(g, 0.0));
    for (auto _ : state) benchmark::DoNotOptimize(coll.collect(s));
}
BENCHMARK(BM_DiagnosticsCollect)->Arg(256);

void BM_Energy(benchmark::State& state) {
    PeriodicGrid g(static_cast<int>(state.range(0)));
    Field u = bump_pair_total(g);
    for (auto _ : state) benchmark::DoNotOptimize(energy(u, 0.2));
}
BENCHMARK(BM_Energy)->Arg(256)->Arg(4096);

} // namespace

BENCHMARK_MAIN();
