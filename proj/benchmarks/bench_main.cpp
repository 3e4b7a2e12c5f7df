// Microbenchmarks for the hot paths: segmented factoring, Jacobi symbols,
// the Dickmann-rho build, and the correlation scans.  Not wired into ctest;
// build the multcorr_bench target and run it directly.
#include <benchmark/benchmark.h>

#include <cmath>
#include <cstdint>

#include "multcorr/char_sum.hpp"
#include "multcorr/correlate.hpp"
#include "multcorr/dickmann.hpp"
#include "multcorr/factor_sieve.hpp"
#include "multcorr/mult_func.hpp"

namespace {

void BM_SieveWindow(benchmark::State& state) {
  const std::uint64_t lo = 1000000000;
  const std::uint64_t width = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) {
    multcorr::SieveRequest req;
    req.lo = lo;
    req.hi = lo + width;
    std::uint64_t factors = 0;
    multcorr::sieve_range(req, [&](multcorr::FactoredSegment&& seg) {
      for (std::uint64_t n = seg.lo(); n < seg.hi(); ++n) {
        factors += seg.factors(n).size();
      }
    });
    benchmark::DoNotOptimize(factors);
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(width));
}
BENCHMARK(BM_SieveWindow)->Arg(1 << 16)->Arg(1 << 20);

void BM_Jacobi(benchmark::State& state) {
  const std::uint64_t Q = 1000003;
  std::uint64_t n = 1;
  for (auto _ : state) {
    int sum = 0;
    for (int i = 0; i < 1000; ++i) {
      sum += multcorr::jacobi(n, Q);
      ++n;
    }
    benchmark::DoNotOptimize(sum);
  }
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_Jacobi);

void BM_BuildRho(benchmark::State& state) {
  const double step = 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state) {
    const multcorr::RhoTable t = multcorr::build_rho(step, 20.0);
    benchmark::DoNotOptimize(t.values.data());
  }
}
BENCHMARK(BM_BuildRho)->Arg(500)->Arg(2000);

void BM_LogCorrelation(benchmark::State& state) {
  const std::uint64_t x = static_cast<std::uint64_t>(state.range(0));
  const multcorr::MultFuncSpec g = multcorr::MultFuncSpec::liouville();
  const double omega = std::log(static_cast<double>(x));
  for (auto _ : state) {
    benchmark::DoNotOptimize(multcorr::log_correlation({g, g, 1, x, omega}));
  }
}
BENCHMARK(BM_LogCorrelation)->Arg(100000)->Arg(1000000);

void BM_MeanValue(benchmark::State& state) {
  const std::uint64_t x = static_cast<std::uint64_t>(state.range(0));
  const multcorr::MultFuncSpec g = multcorr::MultFuncSpec::liouville();
  for (auto _ : state) {
    benchmark::DoNotOptimize(multcorr::mean_value(g, x));
  }
}
BENCHMARK(BM_MeanValue)->Arg(1000000);

void BM_IntegralT(benchmark::State& state) {
  const multcorr::RhoTable t = multcorr::build_rho();
  for (auto _ : state) {
    benchmark::DoNotOptimize(multcorr::integral_T(t, 0.3, 64).value);
  }
}
BENCHMARK(BM_IntegralT);

}  // namespace

BENCHMARK_MAIN();
