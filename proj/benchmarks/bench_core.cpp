// Microbenchmarks comparing the OpenMP ensemble path against the serial
// reference, and the spectral kernels against their O(n^2) references.
#include <benchmark/benchmark.h>

#include "critheat/ensemble.hpp"
#include "critheat/fft.hpp"
#include "critheat/heat_kernel.hpp"
#include "critheat/rng.hpp"
#include "critheat/solver.hpp"

namespace {

using namespace critheat;

SolverConfig bench_config() {
    SolverConfig cfg;
    cfg.grid = {64, 5e-4, 400};
    cfg.sigma = {SigmaKind::CriticalPower, 1.0, 1.5};
    cfg.drift = {4.0, 0.5};
    cfg.thresholds = {0.5, 10.0, {}, 1e6};
    cfg.ensemble.stride = 400;
    cfg.experiment.process = Process::V;
    cfg.experiment.doubling = false;
    return cfg;
}

Field random_field(std::size_t n, std::uint64_t seed) {
    GaussianStream draws(seed);
    Field field(n);
    for (double& v : field) v = draws.next();
    return field;
}

void BM_EnsembleSerial(benchmark::State& state) {
    const SolverConfig cfg = bench_config();
    const auto replicas = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_ensemble(cfg, replicas, 99, 1));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(replicas));
}

void BM_EnsembleOpenMP(benchmark::State& state) {
    const SolverConfig cfg = bench_config();
    const auto replicas = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_ensemble(cfg, replicas, 99, 0));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(replicas));
}

void BM_SemigroupSpectral(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    SpectralWorkspace workspace(n);
    const Field field = random_field(n, 5);
    for (auto _ : state) {
        benchmark::DoNotOptimize(workspace.semigroup_apply(1e-3, field));
    }
}

void BM_SemigroupReference(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const Field field = random_field(n, 5);
    for (auto _ : state) {
        benchmark::DoNotOptimize(semigroup_apply_reference(1e-3, field));
    }
}

void BM_FftRadix2(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    fft::Radix2Plan plan(n);
    GaussianStream draws(7);
    std::vector<std::complex<double>> data(n);
    for (auto& v : data) v = {draws.next(), draws.next()};
    for (auto _ : state) {
        plan.forward(data.data());
        benchmark::ClobberMemory();
    }
}

void BM_DftReference(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    GaussianStream draws(7);
    std::vector<std::complex<double>> data(n);
    std::vector<std::complex<double>> out(n);
    for (auto& v : data) v = {draws.next(), draws.next()};
    for (auto _ : state) {
        fft::dft_reference(data, out);
        benchmark::ClobberMemory();
    }
}

void BM_StepperStep(benchmark::State& state) {
    const Grid grid{static_cast<std::size_t>(state.range(0)), 5e-4, 1};
    Stepper stepper(grid, StepCoefficients{{SigmaKind::CriticalPower, 1.0, 1.5},
                                           1e6, 1.0, 1.0, true, {4.0, 0.5}});
    TrajectoryState trajectory;
    trajectory.field = Field(grid.n, 1.0);
    trajectory.refresh_caches(grid.dx());
    NoiseStream stream(grid, 3);
    NoiseSlice slice;
    stream.next_slice(slice);
    for (auto _ : state) {
        trajectory.t_index = 0;
        stepper.step(trajectory, slice);
        benchmark::ClobberMemory();
    }
}

BENCHMARK(BM_EnsembleSerial)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EnsembleOpenMP)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SemigroupSpectral)->Arg(64)->Arg(1024);
BENCHMARK(BM_SemigroupReference)->Arg(64)->Arg(1024);
BENCHMARK(BM_FftRadix2)->Arg(64)->Arg(1024);
BENCHMARK(BM_DftReference)->Arg(64)->Arg(1024);
BENCHMARK(BM_StepperStep)->Arg(64)->Arg(256);

} // namespace

BENCHMARK_MAIN();
