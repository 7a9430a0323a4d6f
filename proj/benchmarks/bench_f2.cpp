#include <benchmark/benchmark.h>

#include "selmer/bit_matrix.hpp"
#include "selmer/random.hpp"

using namespace selmer;

static void BM_Rank(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    CounterRng rng(42, 0);
    const auto m = f2::sample_uniform(n, n, rng);
    for (auto _ : state) benchmark::DoNotOptimize(f2::rank(m));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Rank)->RangeMultiplier(2)->Range(64, 1024)->Complexity(benchmark::oNCubed);

static void BM_LeftNullity(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    CounterRng rng(7, 0);
    const auto m = f2::sample_uniform(n, n + 2, rng);
    for (auto _ : state) benchmark::DoNotOptimize(f2::left_nullity(m));
}
BENCHMARK(BM_LeftNullity)->Arg(60)->Arg(200);

static void BM_SampleUniform(benchmark::State& state) {
    std::uint64_t t = 0;
    for (auto _ : state) {
        CounterRng rng(1, t++);
        benchmark::DoNotOptimize(f2::sample_uniform(200, 200, rng));
    }
}
BENCHMARK(BM_SampleUniform);

// the random-matrix law at desk size, one worker
static void BM_NullityHistogram(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(f2::nullity_histogram(200, 200, 1000, 3, 1));
    state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_NullityHistogram)->Unit(benchmark::kMillisecond);
