#include "fqlens/entropy.hpp"
#include "fqlens/fq_stats.hpp"

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

namespace {

void BM_tsallis_bern(benchmark::State& state) {
    const double q = static_cast<double>(state.range(0)) / 4.0;
    std::vector<double> ps(4096);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (auto& p : ps) p = u(rng);
    for (auto _ : state) {
        double acc = 0.0;
        for (double p : ps) acc += fqlens::detail::tsallis_unchecked(p, q);
        benchmark::DoNotOptimize(acc);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(ps.size()));
}
// q = 0.5, 1, 2, 4
BENCHMARK(BM_tsallis_bern)->Arg(2)->Arg(4)->Arg(8)->Arg(16);

void BM_locus_diff(benchmark::State& state) {
    const auto k = static_cast<std::size_t>(state.range(0));
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> f(k), w(k, 1.0 / static_cast<double>(k));
    for (auto& x : f) x = u(rng);
    std::vector<std::size_t> order(k);
    for (auto _ : state) {
        benchmark::DoNotOptimize(fqlens::detail::locus_diff_raw(f.data(), w.data(), k, 2.0, order.data()));
    }
}
BENCHMARK(BM_locus_diff)->Arg(2)->Arg(8)->Arg(32);

}  // namespace
