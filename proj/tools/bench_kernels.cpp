#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "spatsign/data.hpp"
#include "spatsign/kernels.hpp"
#include "spatsign/vec.hpp"

// Chunked parallel kernels against their naive serial references, on the
// sweep shapes the estimators actually drive: point sweeps (spatial median),
// pair sweeps (HL), and the pairwise direction pass (signed-rank statistics).

namespace {

using namespace spatsign;

DataMatrix make_data(int n, int p) {
    std::mt19937_64 rng(12345);
    std::normal_distribution<double> normal;
    std::vector<double> values(static_cast<std::size_t>(n) * p);
    for (double& v : values) v = normal(rng);
    return DataMatrix(n, p, std::move(values));
}

void bm_point_sweep(benchmark::State& state) {
    const DataMatrix data = make_data(static_cast<int>(state.range(0)), 8);
    const Vec mu(8, 0.1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(kernels::point_sweep(data, mu, 0.0));
    }
}

void bm_point_sweep_ref(benchmark::State& state) {
    const DataMatrix data = make_data(static_cast<int>(state.range(0)), 8);
    const Vec mu(8, 0.1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(kernels::point_sweep_ref(data, mu, 0.0));
    }
}

void bm_pair_sweep(benchmark::State& state) {
    const DataMatrix data = make_data(static_cast<int>(state.range(0)), 8);
    const Vec mu(8, 0.1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(kernels::pair_sweep(data, mu, 0.0));
    }
}

void bm_pair_sweep_ref(benchmark::State& state) {
    const DataMatrix data = make_data(static_cast<int>(state.range(0)), 8);
    const Vec mu(8, 0.1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(kernels::pair_sweep_ref(data, mu, 0.0));
    }
}

void bm_pair_direction_stats(benchmark::State& state) {
    const DataMatrix data = make_data(static_cast<int>(state.range(0)), 8);
    const Vec center(8, 0.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(kernels::pair_direction_stats(data, center));
    }
}

void bm_pair_direction_stats_ref(benchmark::State& state) {
    const DataMatrix data = make_data(static_cast<int>(state.range(0)), 8);
    const Vec center(8, 0.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(kernels::pair_direction_stats_ref(data, center));
    }
}

BENCHMARK(bm_point_sweep)->Arg(1000)->Arg(100000);
BENCHMARK(bm_point_sweep_ref)->Arg(1000)->Arg(100000);
BENCHMARK(bm_pair_sweep)->Arg(200)->Arg(1000);
BENCHMARK(bm_pair_sweep_ref)->Arg(200)->Arg(1000);
BENCHMARK(bm_pair_direction_stats)->Arg(200)->Arg(1000);
BENCHMARK(bm_pair_direction_stats_ref)->Arg(200)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
