#include <benchmark/benchmark.h>

#include "campana/arith.hpp"
#include "campana/euler.hpp"
#include "campana/points.hpp"
#include "campana/zoo.hpp"

using namespace campana;

static void BM_Sieve(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(SieveTable(static_cast<std::uint64_t>(st.range(0))));
}
BENCHMARK(BM_Sieve)->Arg(1 << 16)->Arg(1 << 20)->Unit(benchmark::kMillisecond);

static void BM_MFullList(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(m_full_list(1000000000ULL, static_cast<int>(st.range(0))));
}
BENCHMARK(BM_MFullList)->DenseRange(2, 4)->Unit(benchmark::kMillisecond);

static void BM_Count(benchmark::State& st, const char* name, double T) {
  const auto m = make_zoo_model(name);
  count_points(m, T, Kind::campana);  // warm the sieve
  for (auto _ : st) benchmark::DoNotOptimize(count_points(m, T, Kind::campana));
}
BENCHMARK_CAPTURE(BM_Count, p1, "p1", 1e6)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Count, pn_hyperplane, "pn_hyperplane", 1e4)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Count, p2_three_lines, "p2_three_lines", 1e6)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Count, by_four_lines, "by_four_lines", 1e4)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Count, blowup_p2, "blowup_p2", 1e4)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Count, dp_d5, "dp_d5", 3e3)->Unit(benchmark::kMillisecond);

static void BM_WeakSubfamilyA(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(count_weak_subfamily_A(static_cast<std::uint64_t>(st.range(0))));
}
BENCHMARK(BM_WeakSubfamilyA)->Arg(100000)->Arg(1000000)->Unit(benchmark::kMillisecond);

static void BM_RegularizedProduct(benchmark::State& st) {
  const auto d = zoo_stratum_data(make_zoo_model("dp_d5"));
  std::map<std::string, Complex> s;
  for (const auto& c : d.components) s[c.id] = Complex(c.rho, 0);
  for (auto _ : st) benchmark::DoNotOptimize(regularized_euler_product(d, s, static_cast<std::uint64_t>(st.range(0))));
}
BENCHMARK(BM_RegularizedProduct)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
