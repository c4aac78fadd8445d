#include "fqlens/sim/config.hpp"
#include "fqlens/sim/simulator.hpp"

#include <benchmark/benchmark.h>

namespace {

fqlens::sim::SimConfig bench_config() {
    return fqlens::sim::parse_sim_config(R"(
seed = 1
generations = 17
demes = ["WA", "EA", "CSN"]
[founders]
count = 60
loci = 5000
model = "balding_nichols"
divergence = 0.05
[genome]
chromosomes = 4
length_bp = 100000000
[[schedule]]
from_generation = 0
rho = { WA = 0.3, EA = 0.5, CSN = 0.1 }
)",
                                         false);
}

/// One generation step after `range(0)` warm-up steps (census grows ~1.5× per step).
void BM_simulation_step(benchmark::State& state) {
    const auto cfg = bench_config();
    for (auto _ : state) {
        state.PauseTiming();
        fqlens::sim::Simulator sim(cfg);
        for (int g = 0; g < state.range(0); ++g) sim.step();
        state.ResumeTiming();
        benchmark::DoNotOptimize(sim.step().children);
    }
}
BENCHMARK(BM_simulation_step)->Arg(0)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_generation_statistics(benchmark::State& state) {
    fqlens::sim::Simulator sim(bench_config());
    for (int g = 0; g < state.range(0); ++g) sim.step();
    for (auto _ : state) benchmark::DoNotOptimize(sim.statistics().size());
}
BENCHMARK(BM_generation_statistics)->Arg(0)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace
