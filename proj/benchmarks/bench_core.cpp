#include <benchmark/benchmark.h>

#include "bmrep/bte.hpp"
#include "bmrep/cir.hpp"
#include "bmrep/dyson.hpp"
#include "bmrep/lognormal.hpp"
#include "bmrep/malliavin.hpp"
#include "bmrep/mc.hpp"
#include "bmrep/parse.hpp"
#include "bmrep/special.hpp"

using namespace bmrep;

static void BM_StirlingRow(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(stirling2(n, n / 2));
}
BENCHMARK(BM_StirlingRow)->Arg(20)->Arg(80);

static void BM_LognormalDyson(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(lognormal_dyson_series(0.0, 0.6, 0.0, 1.0, 0.0, n));
}
BENCHMARK(BM_LognormalDyson)->Arg(10)->Arg(40);

static void BM_IteratedDerivative(benchmark::State& state) {
  const Expr f = parse_expr("exp(neg(intdt(W,0,1)))*W(1)^2");
  std::vector<SymbolicTime> times;
  for (int i = 0; i < state.range(0); ++i) times.push_back({"s" + std::to_string(i), 0.0, 1.0});
  for (auto _ : state) benchmark::DoNotOptimize(iterated_second_derivative(f, times));
}
BENCHMARK(BM_IteratedDerivative)->Arg(1)->Arg(2)->Arg(3);

static void BM_DysonMerton(benchmark::State& state) {
  const Expr f = examples::merton(1.0);
  const PathContext path = PathContext::from_knots({{0.5, 0.3}, {1.0, 0.3}});
  for (auto _ : state) benchmark::DoNotOptimize(conditional_expectation(f, 0.5, 1.0, path, 40));
}
BENCHMARK(BM_DysonMerton);

static void BM_DysonQuadrature(benchmark::State& state) {
  const Expr f = parse_expr("exp(scale(0.5,W(1)))*intdt(W,0,1)");
  const PathContext path = PathContext::from_knots({{0.25, 0.3}, {1.0, 0.3}});
  const DysonOptions opts{static_cast<QuadratureMethod>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(dyson_term(f, 2, 0.25, 1.0, path, opts));
}
BENCHMARK(BM_DysonQuadrature)->Arg(0)->Arg(1)->Arg(2);

static void BM_BteMultiStep(benchmark::State& state) {
  const int M = static_cast<int>(state.range(0));
  std::vector<std::pair<double, double>> knots;
  for (int i = 1; i <= M; ++i) knots.emplace_back(double(i) / M, 0.1 * i);
  const PathContext path = PathContext::from_knots(knots);
  const Expr f = Expr::brownian(1.0).pow(4);
  for (auto _ : state) benchmark::DoNotOptimize(bte_multi_step(f, 0, M, 1.0 / M, 4, path));
}
BENCHMARK(BM_BteMultiStep)->Arg(4)->Arg(16)->Arg(64);

static void BM_CirPrice(benchmark::State& state) {
  const Kernel sigma = Kernel::polynomial({1.0, 0.1}), b = Kernel::polynomial({0.2});
  for (auto _ : state) benchmark::DoNotOptimize(cir_price(0.5, 0.05, 2, sigma, b));
}
BENCHMARK(BM_CirPrice);

static void BM_MonteCarlo(benchmark::State& state) {
  const Expr f = examples::lognormal(0.0, 0.6, 1.0);
  const TimeGrid grid = TimeGrid::uniform(1.0, 1.0 / 64);
  for (auto _ : state) benchmark::DoNotOptimize(estimate_expectation(f, grid, 1u << 16, 7));
  state.SetItemsProcessed(state.iterations() * (1 << 16));
}
BENCHMARK(BM_MonteCarlo)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
