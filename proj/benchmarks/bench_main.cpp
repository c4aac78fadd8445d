// The packaged benchmark_main archive carries LTO bytecode from another
// compiler release, so the entry point is supplied here.
#include <benchmark/benchmark.h>

BENCHMARK_MAIN();
