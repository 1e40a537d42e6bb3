#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "conncoord/delay.hpp"
#include "conncoord/potential.hpp"
#include "conncoord/scenario.hpp"
#include "conncoord/simulator.hpp"

namespace {

using namespace conncoord;

void BM_GradPsi(benchmark::State& state) {
    PotentialParams params;
    params.N = 5;
    params.n = static_cast<std::size_t>(state.range(0));
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-0.4, 0.4);
    std::vector<Eigen::VectorXd> xs;
    for (int k = 0; k < 256; ++k) {
        Eigen::VectorXd v(state.range(0));
        for (auto& c : v) c = u(rng);
        xs.push_back(v);
    }
    std::size_t k = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(grad_psi(xs[k % 256], xs[(k + 1) % 256], params));
        ++k;
    }
}
BENCHMARK(BM_GradPsi)->Arg(1)->Arg(2)->Arg(3);

void BM_HistoryLookup(benchmark::State& state) {
    History h(0.1 + 4e-3);
    Eigen::VectorXd x(1);
    for (int k = 0; k <= 2000; ++k) {
        x(0) = std::sin(1e-3 * k);
        h.record(1e-3 * k, x);
    }
    const DelayProfile profile(DelayProfileSpec{DelayKind::sinusoidal, 0.1});
    double t = 1.9;
    for (auto _ : state) {
        benchmark::DoNotOptimize(query_delayed(h, t, profile));
        t += 1e-6;
        if (t > 2.0) t = 1.9;
    }
}
BENCHMARK(BM_HistoryLookup);

ScenarioConfig si_scenario(double horizon) {
    ScenarioConfig cfg;
    cfg.name = "bench";
    for (double x : {1.0, 1.5, 2.1, 2.7, 3.2}) {
        cfg.initial_positions.push_back(Eigen::VectorXd::Constant(1, x));
        cfg.initial_velocities.push_back(Eigen::VectorXd::Zero(1));
    }
    for (double k : {30.0, 60.0, 60.0, 60.0, 30.0}) cfg.damping.push_back(Eigen::VectorXd::Constant(1, k));
    cfg.integrator.horizon = horizon;
    return cfg;
}

void BM_SingleIntegratorRun(benchmark::State& state) {
    const ScenarioConfig cfg = si_scenario(1.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_scenario(cfg));
    }
    state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_SingleIntegratorRun)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
