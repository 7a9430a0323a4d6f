#include <benchmark/benchmark.h>

#include <vector>

#include "selmer/harness.hpp"
#include "selmer/matrix_pipeline.hpp"
#include "selmer/model_p.hpp"
#include "selmer/selmer_oracle.hpp"

using namespace selmer;

namespace {

const CurveContext& curve() {
    static const CurveContext c(1, -1);
    return c;
}

const std::vector<arith::i64>& twists() {
    static const auto ds = arith::SquarefreeStream::collect(2000, curve().bad_primes());
    return ds;
}

}  // namespace

static void BM_MatrixRank(benchmark::State& state) {
    const Pipeline pl(curve());
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(pl.selmer_rank(twists()[i]));
        i = (i + 1) % twists().size();
    }
}
BENCHMARK(BM_MatrixRank);

static void BM_OracleRank(benchmark::State& state) {
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(brute_force_selmer(curve(), twists()[i]));
        i = (i + 1) % twists().size();
    }
}
BENCHMARK(BM_OracleRank);

static void BM_SurgeryFull(benchmark::State& state) {
    const Pipeline pl(curve());
    const ArithmeticOracle o(curve(), 7 * 11 * 13 * 17 * 19 * 23);
    const auto td = analyze(curve(), o);
    const auto m = pl.build_M(td, o);
    for (auto _ : state) benchmark::DoNotOptimize(surgery(m, curve(), {.check = state.range(0) != 0}));
}
BENCHMARK(BM_SurgeryFull)->Arg(0)->Arg(1);

static void BM_ModelDraw(benchmark::State& state) {
    const Pipeline pl(curve());
    const auto n = static_cast<std::size_t>(state.range(0));
    std::uint64_t t = 0;
    for (auto _ : state) {
        CounterRng rng(11, t++);
        const auto table = model::sample_symbols(curve(), n, rng);
        benchmark::DoNotOptimize(pl.selmer_rank(table));
    }
}
BENCHMARK(BM_ModelDraw)->Arg(20)->Arg(60)->Arg(100);

static void BM_Sweep(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(harness::sweep(curve(), static_cast<arith::u64>(state.range(0)), harness::SweepMode::Coprime, 1));
}
BENCHMARK(BM_Sweep)->Arg(2000)->Arg(20000)->Unit(benchmark::kMillisecond);
