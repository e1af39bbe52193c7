// Serial reference against the OpenMP kernel for each parallel hot spot.
#include <benchmark/benchmark.h>

#include "zeitlin/basis.hpp"
#include "zeitlin/measures.hpp"
#include "zeitlin/remainder.hpp"
#include "zeitlin/structconst.hpp"
#include "zeitlin/structure_table.hpp"

using namespace zeitlin;

static void BM_TableBuild_Serial(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(structconst::StructureTable::build_serial(st.range(0)));
}
static void BM_TableBuild_OpenMP(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(structconst::StructureTable::build(st.range(0)));
}
BENCHMARK(BM_TableBuild_Serial)->Arg(9)->Arg(17)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TableBuild_OpenMP)->Arg(9)->Arg(17)->Unit(benchmark::kMillisecond);

static void BM_Closure_Serial(benchmark::State& st) {
  const int N = st.range(0);
  const auto& B = basis::shared_basis(N);
  const auto t = structconst::StructureTable::build(N);
  for (auto _ : st) benchmark::DoNotOptimize(basis::closure_residual_serial(B, t));
}
static void BM_Closure_OpenMP(benchmark::State& st) {
  const int N = st.range(0);
  const auto& B = basis::shared_basis(N);
  const auto t = structconst::StructureTable::build(N);
  for (auto _ : st) benchmark::DoNotOptimize(basis::closure_residual(B, t));
}
BENCHMARK(BM_Closure_Serial)->Arg(9)->Arg(13)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Closure_OpenMP)->Arg(9)->Arg(13)->Unit(benchmark::kMillisecond);

static void BM_DiffBound_Serial(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(structconst::diff_bound_check_serial(st.range(0)));
}
static void BM_DiffBound_OpenMP(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(structconst::diff_bound_check(st.range(0)));
}
BENCHMARK(BM_DiffBound_Serial)->Arg(17)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DiffBound_OpenMP)->Arg(17)->Unit(benchmark::kMillisecond);

static void BM_SampleMu_Serial(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(measures::sample_mu_serial(st.range(0), 2000, 1));
}
static void BM_SampleMu_OpenMP(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(measures::sample_mu(st.range(0), 2000, 1));
}
BENCHMARK(BM_SampleMu_Serial)->Arg(9)->Arg(33)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SampleMu_OpenMP)->Arg(9)->Arg(33)->Unit(benchmark::kMillisecond);

static void BM_RemainderDirect_Serial(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(remainder::expected_remainder_sq_direct_serial(st.range(0), 4.0));
}
static void BM_RemainderDirect_OpenMP(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(remainder::expected_remainder_sq_direct(st.range(0), 4.0));
}
BENCHMARK(BM_RemainderDirect_Serial)->Arg(9)->Arg(13)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RemainderDirect_OpenMP)->Arg(9)->Arg(13)->Unit(benchmark::kMillisecond);

static void BM_Torus_Serial(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(remainder::torus_expected_remainder_sq_serial(st.range(0), 5.0));
}
static void BM_Torus_OpenMP(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(remainder::torus_expected_remainder_sq(st.range(0), 5.0));
}
BENCHMARK(BM_Torus_Serial)->Arg(17)->Arg(33)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Torus_OpenMP)->Arg(17)->Arg(33)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
