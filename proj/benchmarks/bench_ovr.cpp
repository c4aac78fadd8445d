#include "fqlens/panel.hpp"
#include "fqlens/region_stats.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

/// 1000 haplotypes × 100000 loci, five populations, random alleles.
const fqlens::HaplotypePanel& big_panel() {
    static const fqlens::HaplotypePanel panel = [] {
        const std::size_t n_hap = 1000, n_loci = 100000;
        std::vector<fqlens::HaplotypeMeta> haps;
        for (std::size_t h = 0; h < n_hap; ++h) {
            haps.push_back({"s" + std::to_string(h / 2), static_cast<std::uint8_t>(h % 2),
                            "pop" + std::to_string((h / 2) % 5)});
        }
        std::vector<fqlens::LocusMeta> loci;
        for (std::size_t j = 0; j < n_loci; ++j) loci.push_back({"1", j + 1, ""});
        fqlens::BitMatrix m(n_hap, n_loci);
        std::mt19937_64 rng(1);
        for (std::size_t h = 0; h < n_hap; ++h) {
            for (auto& w : m.row(h)) w = rng();
            m.row(h).back() &= ~0ULL >> (64 - n_loci % 64);
        }
        return fqlens::HaplotypePanel(std::move(haps), std::move(loci), std::move(m));
    }();
    return panel;
}

void BM_count_table(benchmark::State& state) {
    const auto& p = big_panel();
    const auto pops = p.populations();
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            fqlens::CountTable::from_panel(p, pops, static_cast<unsigned>(state.range(0))).n_loci());
    }
}
BENCHMARK(BM_count_table)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_ovr_fq(benchmark::State& state) {
    const auto& p = big_panel();
    const fqlens::Region region = p.populations();
    const double q = static_cast<double>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(fqlens::ovr_fq(p, region.front(), region, fqlens::QOrder(q), 1).value);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(p.n_loci()));
}
BENCHMARK(BM_ovr_fq)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

}  // namespace
