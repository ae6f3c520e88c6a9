// Parallel kernels against their serial references.  Run with
// EKLAB_THREADS=<k> to pin the parallel side's thread count.
#include <benchmark/benchmark.h>

#include "eklab/arith.hpp"
#include "eklab/kubilius.hpp"
#include "eklab/reals.hpp"

namespace {

void sieve_reference(benchmark::State& state) {
    const auto n = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(eklab::arith::omega_range_reference(1, n));
}
BENCHMARK(sieve_reference)->Arg(1 << 20)->Arg(1 << 22)->Unit(benchmark::kMillisecond);

void sieve_segmented(benchmark::State& state) {
    const auto n = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(eklab::arith::omega_range(1, n));
}
BENCHMARK(sieve_segmented)->Arg(1 << 20)->Arg(1 << 22)->Unit(benchmark::kMillisecond);

void floor_range(benchmark::State& state) {
    const auto n = static_cast<std::uint64_t>(state.range(0));
    const auto spec = eklab::reals::BeattySpec::parse("sqrt:2", "rational:0");
    for (auto _ : state)
        benchmark::DoNotOptimize(eklab::reals::beatty_floor_range(spec, 1, n));
}
BENCHMARK(floor_range)->Arg(1 << 14)->Arg(1 << 17)->Unit(benchmark::kMillisecond);

void model_sampling(benchmark::State& state) {
    const auto draws = static_cast<std::uint64_t>(state.range(0));
    const auto primes = eklab::arith::sieve_primes(1000);
    const auto model = eklab::kubilius::KubiliusModel::make(primes, 7);
    for (auto _ : state)
        benchmark::DoNotOptimize(eklab::kubilius::sample_model(model, draws));
}
BENCHMARK(model_sampling)->Arg(1 << 15)->Arg(1 << 18)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
