#include <benchmark/benchmark.h>

#include "hqva/harness/cache.hpp"
#include "hqva/harness/suite.hpp"

using namespace hqva;

namespace {

// Argument encoding shared by the benchmarks: 0 = C1, 1 = B1, 2 = D2.
LieTypeData type_of(std::int64_t i) {
    switch (i) {
        case 0: return lie_type_data(Family::C, 1);
        case 1: return lie_type_data(Family::B, 1);
        default: return lie_type_data(Family::D, 2);
    }
}

void BM_SolveNormalizer(benchmark::State& state) {
    const LieTypeData ltd = type_of(state.range(0));
    const int L = static_cast<int>(state.range(1));
    for (auto _ : state) benchmark::DoNotOptimize(solve_normalizer(ltd, L, 10));
    state.SetLabel(ltd.label());
}
BENCHMARK(BM_SolveNormalizer)->ArgsProduct({{0, 1, 2}, {3, 4}})->Unit(benchmark::kMillisecond);

// One check at L=3 with the R-matrix solved outside the timed loop.
void run_check(benchmark::State& state, const std::string& name, int k) {
    const LieTypeData ltd = type_of(state.range(0));
    MemoryRMatrixSource source;
    CheckParams p;
    p.family = ltd.family;
    p.n = ltd.n;
    p.order = 3;
    p.k = k;
    p.caps = {{"u", 2}, {"v", 2}};
    source.get(p.family, p.n, p.order);
    for (auto _ : state) {
        harness::SuiteEntry e;
        e.check = name;
        e.params = p;
        const CheckReport r = harness::run_entry(e, source);
        if (r.verdict != Verdict::Pass) state.SkipWithError(("check did not pass: " + r.witness).c_str());
    }
    state.SetLabel(ltd.label());
}

void BM_YbeHat(benchmark::State& state) { run_check(state, "ybe_hat", 1); }
BENCHMARK(BM_YbeHat)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

void BM_Correspondence(benchmark::State& state) { run_check(state, "correspondence", 1); }
BENCHMARK(BM_Correspondence)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

void BM_RttMinusK2(benchmark::State& state) { run_check(state, "rtt_minus", 2); }
BENCHMARK(BM_RttMinusK2)->DenseRange(0, 1)->Unit(benchmark::kMillisecond);

void BM_Hexagon(benchmark::State& state) { run_check(state, "hexagon", 1); }
BENCHMARK(BM_Hexagon)->DenseRange(0, 1)->Unit(benchmark::kMillisecond);

void BM_CacheRoundTrip(benchmark::State& state) {
    const harness::CacheKey key{Family::D, 2, 4, 10};
    const Normalizer nz = solve_normalizer(lie_type_data(key.family, key.n), key.order, key.z_degree);
    const std::string body = harness::serialize_entry(key, nz);
    for (auto _ : state) benchmark::DoNotOptimize(harness::parse_entry(body, key));
}
BENCHMARK(BM_CacheRoundTrip)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
