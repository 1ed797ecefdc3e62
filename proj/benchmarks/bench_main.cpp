#include <benchmark/benchmark.h>

#include "cfs/diracsea.hpp"
#include "cfs/geometry.hpp"
#include "cfs/measure.hpp"
#include "cfs/vacuum.hpp"

namespace {

cfs::LatticeSpec lattice(int ns) { return cfs::LatticeSpec{1.0, 2, ns, 0.5}; }

const cfs::LatticeSeaSystem& cached_system(int ns) {
  static const cfs::LatticeSeaSystem small = cfs::build_system(lattice(2));
  static const cfs::LatticeSeaSystem medium = cfs::build_system(lattice(3));
  return ns == 2 ? small : medium;
}

void BM_BuildSystem(benchmark::State& state) {
  const cfs::LatticeSpec spec = lattice(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(cfs::build_system(spec));
}
BENCHMARK(BM_BuildSystem)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_ProductEigenvalues(benchmark::State& state) {
  const auto& sys = cached_system(3);
  const auto& x = sys.operator_at(0);
  const auto& y = sys.operator_at(sys.point_count() / 2);
  for (auto _ : state) benchmark::DoNotOptimize(cfs::product_eigenvalues(x, y));
}
BENCHMARK(BM_ProductEigenvalues);

void BM_ClosedChain(benchmark::State& state) {
  const auto& sys = cached_system(3);
  const auto& x = sys.operator_at(0);
  const auto& y = sys.operator_at(sys.point_count() / 2);
  for (auto _ : state) benchmark::DoNotOptimize(cfs::closed_chain(x, y));
}
BENCHMARK(BM_ClosedChain);

void BM_CausalAction(benchmark::State& state) {
  const auto& rho = cached_system(static_cast<int>(state.range(0))).measure();
  cfs::SweepOptions opts;
  opts.use_symmetry = state.range(1) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(cfs::causal_action(rho, opts));
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * rho.size() * rho.size()));
}
BENCHMARK(BM_CausalAction)->Args({2, 0})->Args({2, 1})->Args({3, 0})->Args({3, 1})->Unit(benchmark::kMillisecond);

void BM_CausalityAudit(benchmark::State& state) {
  const auto& sys = cached_system(3);
  const auto pairs = cfs::sample_pairs(sys.point_count(), 200, 0);
  for (auto _ : state) benchmark::DoNotOptimize(cfs::causality_audit(sys, pairs));
}
BENCHMARK(BM_CausalityAudit)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
