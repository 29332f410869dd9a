#include <benchmark/benchmark.h>

#include "oddreg/apbinary.hpp"
#include "oddreg/arith.hpp"
#include "oddreg/forms.hpp"
#include "oddreg/genus.hpp"
#include "oddreg/localrep.hpp"
#include "oddreg/sieve.hpp"
#include "oddreg/watson.hpp"

using namespace oddreg;

static void BM_smallest_w(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(arith::smallest_w(167LL * 191 * 431, 0));
}
BENCHMARK(BM_smallest_w);

static void BM_canonical(benchmark::State& state) {
    forms::GramLattice l(forms::DiagonalForm(5, 6, 8));
    for (auto _ : state) benchmark::DoNotOptimize(l.canonical().gram2());
}
BENCHMARK(BM_canonical);

static void BM_rep_set(benchmark::State& state) {
    forms::GramLattice l(forms::DiagonalForm(3, 4, 7));
    const i64 n = state.range(0);
    for (auto _ : state) benchmark::DoNotOptimize(sieve::rep_set(l, n).bits.size());
    state.SetComplexityN(n);
}
BENCHMARK(BM_rep_set)->Arg(100000)->Arg(1000000)->Complexity();

static void BM_verify_regularity_odd(benchmark::State& state) {
    forms::GramLattice l(forms::DiagonalForm(1, 4, 5));
    for (auto _ : state)
        benchmark::DoNotOptimize(
            sieve::verify_regularity(l, sieve::Mode::odd, state.range(0)).exceptions.size());
}
BENCHMARK(BM_verify_regularity_odd)->Arg(100000)->Arg(1000000)->Unit(benchmark::kMillisecond);

static void BM_enumerate_genus(benchmark::State& state) {
    forms::GramLattice l(forms::DiagonalForm(3, 4, 27));
    for (auto _ : state) benchmark::DoNotOptimize(genus::enumerate_genus(l).h());
}
BENCHMARK(BM_enumerate_genus)->Unit(benchmark::kMillisecond);

static void BM_psi(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(apbinary::psi(5, 157, 173, 26).psi);
}
BENCHMARK(BM_psi)->Unit(benchmark::kMillisecond);

static void BM_local_cache(benchmark::State& state) {
    forms::GramLattice l(forms::DiagonalForm(2, 5, 24));
    localrep::LocalCache cache(l);
    i64 n = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(cache.represents_genus(n));
        n += 2;
    }
}
BENCHMARK(BM_local_cache);

static void BM_lambda_chain(benchmark::State& state) {
    forms::DiagonalForm f(1, 9, 108);
    for (auto _ : state) benchmark::DoNotOptimize(watson::reduce_to_stable(f).steps.size());
}
BENCHMARK(BM_lambda_chain);

BENCHMARK_MAIN();
