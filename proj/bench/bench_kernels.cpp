#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "ctm/analysis.hpp"
#include "ctm/bifurcation.hpp"
#include "ctm/kernels.hpp"
#include "ctm/network.hpp"
#include "ctm/sigmoid.hpp"

namespace {

struct DriftFixture {
    ctm::Network net;
    ctm::Sigmoid sigmoid;
    std::vector<double> x, dx, coupled;

    explicit DriftFixture(int N) {
        net = ctm::build_three_cluster({N, N / 4, 0.2});
        std::mt19937_64 rng(1);
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        x.resize(N);
        for (auto& xi : x) xi = dist(rng);
        dx.assign(N, 0.0);
        coupled.assign(N, 0.0);
    }
};

void BM_DriftSerial(benchmark::State& state) {
    DriftFixture f(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        ctm::kernels::ctm_drift_serial(f.net, f.sigmoid, 1.2, 1.0, f.x, f.dx, f.coupled);
        benchmark::DoNotOptimize(f.dx.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

void BM_DriftParallel(benchmark::State& state) {
    DriftFixture f(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        ctm::kernels::ctm_drift_parallel(f.net, f.sigmoid, 1.2, 1.0, f.x, f.dx, f.coupled);
        benchmark::DoNotOptimize(f.dx.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

void BM_TransitionSweep(benchmark::State& state, ctm::Execution exec) {
    const int N = static_cast<int>(state.range(0));
    for (auto _ : state) {
        auto reports = ctm::transition_sweep(N, 2, (N - 1) / 2, exec);
        benchmark::DoNotOptimize(reports.data());
    }
}

void BM_BranchContinuation(benchmark::State& state, ctm::Execution exec) {
    const int steps = static_cast<int>(state.range(0));
    for (auto _ : state) {
        auto diagram = ctm::branch_continuation(11, 4, 0.0, 0.0, 3.0, steps, 0.0, exec);
        benchmark::DoNotOptimize(diagram.points.data());
    }
}

}  // namespace

BENCHMARK(BM_DriftSerial)->Arg(500)->Arg(2000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_DriftParallel)->Arg(500)->Arg(2000)->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(BM_TransitionSweep, serial, ctm::Execution::Serial)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_TransitionSweep, parallel, ctm::Execution::Parallel)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_BranchContinuation, serial, ctm::Execution::Serial)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_BranchContinuation, parallel, ctm::Execution::Parallel)->Arg(200)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
