// Serial reference kernels against their OpenMP versions.
// Run with ASSOUADLAB_THREADS=k to pin the parallel variant.

#include "assouadlab/estimate.hpp"
#include "assouadlab/percolation.hpp"

#include <benchmark/benchmark.h>

using namespace assouadlab;

namespace {

const PercConfig kConfig{2, 2, Rational(7, 10), 11};

const GridSet& sample_set() {
    static const GridSet set = simulate(kConfig, 8).grid(8);
    return set;
}

void BM_simulate_serial(benchmark::State& st) {
    for (auto _ : st) {
        benchmark::DoNotOptimize(simulate_serial(kConfig, static_cast<std::size_t>(st.range(0))));
    }
}

void BM_simulate(benchmark::State& st) {
    for (auto _ : st) {
        benchmark::DoNotOptimize(simulate(kConfig, static_cast<std::size_t>(st.range(0))));
    }
}

void BM_sup_count_reference(benchmark::State& st) {
    const auto& S = sample_set();
    const auto centers = choose_centers(S, CenterChoice::sampled(64, 1));
    for (auto _ : st) {
        benchmark::DoNotOptimize(sup_local_count_reference(S, centers, 0.125, 1.0 / 128));
    }
}

void BM_sup_count(benchmark::State& st) {
    const auto& S = sample_set();
    const auto centers = choose_centers(S, CenterChoice::sampled(64, 1));
    for (auto _ : st) {
        benchmark::DoNotOptimize(sup_local_count(S, centers, 0.125, 1.0 / 128));
    }
}

void BM_hausdorff_reference(benchmark::State& st) {
    const auto& S = sample_set();
    const auto full = GridSet::full(S.resolution());
    for (auto _ : st) {
        benchmark::DoNotOptimize(hausdorff_distance_reference(S, full));
    }
}

void BM_hausdorff(benchmark::State& st) {
    const auto& S = sample_set();
    const auto full = GridSet::full(S.resolution());
    for (auto _ : st) {
        benchmark::DoNotOptimize(hausdorff_distance(S, full));
    }
}

} // namespace

BENCHMARK(BM_simulate_serial)->Arg(10)->Arg(12)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_simulate)->Arg(10)->Arg(12)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_sup_count_reference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_sup_count)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_hausdorff_reference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_hausdorff)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
