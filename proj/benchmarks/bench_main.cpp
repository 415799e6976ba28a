#include <benchmark/benchmark.h>

#include "edcode/metrics.hpp"
#include "edcode/util.hpp"

namespace {

edcode::SymbolString random_string(std::uint64_t seed, std::size_t len,
                                   edcode::Symbol alpha) {
    edcode::Rng rng(seed);
    edcode::SymbolString s(len);
    for (auto& x : s) x = static_cast<edcode::Symbol>(rng.below(alpha));
    return s;
}

void BM_EditDistance(benchmark::State& state) {
    auto x = random_string(1, static_cast<std::size_t>(state.range(0)), 4);
    auto y = random_string(2, static_cast<std::size_t>(state.range(0)), 4);
    for (auto _ : state) benchmark::DoNotOptimize(edcode::edit_distance(x, y));
}
BENCHMARK(BM_EditDistance)->Arg(32)->Arg(128)->Arg(512);

void BM_SuffixDistance(benchmark::State& state) {
    auto x = random_string(3, static_cast<std::size_t>(state.range(0)), 4);
    auto y = random_string(4, static_cast<std::size_t>(state.range(0)), 4);
    for (auto _ : state) benchmark::DoNotOptimize(edcode::suffix_distance(x, y));
}
BENCHMARK(BM_SuffixDistance)->Arg(16)->Arg(64)->Arg(128);

} // namespace
