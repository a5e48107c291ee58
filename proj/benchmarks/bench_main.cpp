#include <benchmark/benchmark.h>

#include <random>

#include "longwave/cell_solver.hpp"
#include "longwave/effective.hpp"
#include "longwave/wave.hpp"

using namespace longwave;

static void BM_CellSolveFirstOrder1D(benchmark::State& state) {
  const CoefficientField a(cos1d_medium(), {static_cast<int>(state.range(0))});
  const CellSolver solver(a);
  const WeakRhs rhs = rhs_order1(a, 0);
  for (auto _ : state) benchmark::DoNotOptimize(solver.solve(rhs));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_CellSolveFirstOrder1D)->RangeMultiplier(4)->Range(256, 16384)->Complexity();

static void BM_CellSolveFirstOrder2D(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const CoefficientField a(laminate2d_medium(), {n, n});
  const CellSolver solver(a);
  const WeakRhs rhs = rhs_order1(a, 1);
  for (auto _ : state) benchmark::DoNotOptimize(solver.solve(rhs));
}
BENCHMARK(BM_CellSolveFirstOrder2D)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_Algorithm1(benchmark::State& state) {
  const CoefficientField a(cos1d_medium(), {1024});
  const int alpha = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(algorithm1(a, alpha, 0.1));
}
BENCHMARK(BM_Algorithm1)->Arg(2)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

static void BM_FineOperatorApply1D(benchmark::State& state) {
  const int cells = static_cast<int>(state.range(0));
  const MacroGrid g{{0.0}, {cells * 0.1}, {cells * 8}, 0.1, {1.0}};
  const FineOperator op(g, cos1d_medium());
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n;
  Field u(static_cast<std::size_t>(cells * 8));
  for (auto& x : u) x = n(rng);
  for (auto _ : state) benchmark::DoNotOptimize(op.apply(u));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(u.size()));
}
BENCHMARK(BM_FineOperatorApply1D)->Arg(420)->Arg(1680);

static void BM_FineOperatorApply2D(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const MacroGrid g{{0.0, 0.0}, {m / 80.0, m / 80.0}, {m, m}, 0.1, {1.0, 1.0}};
  const FineOperator op(g, laminate2d_medium());
  Field u(static_cast<std::size_t>(m) * m, 1.0);
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = std::sin(0.01 * static_cast<double>(i));
  for (auto _ : state) benchmark::DoNotOptimize(op.apply(u));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(u.size()));
}
BENCHMARK(BM_FineOperatorApply2D)->Arg(256)->Arg(512);

static void BM_SymPowerMatricize(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const int n = static_cast<int>(state.range(1));
  SymTensor a = SymTensor::identity(d);
  a[1] = 0.3;
  for (auto _ : state) benchmark::DoNotOptimize(min_eigenvalue(matricize(sym_power(a, n))));
}
BENCHMARK(BM_SymPowerMatricize)->Args({2, 2})->Args({3, 2})->Args({3, 3})->Args({3, 4});

static void BM_Symmetrize(benchmark::State& state) {
  const int order = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(symmetrize(3, order, [](std::span<const int> idx) { return static_cast<double>(idx[0] + 2 * idx.back()); }));
}
BENCHMARK(BM_Symmetrize)->Arg(4)->Arg(6)->Arg(8);
BENCHMARK_MAIN();
