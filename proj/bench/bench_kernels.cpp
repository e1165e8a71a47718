#include <benchmark/benchmark.h>

#include <philap/config.hpp>
#include <philap/kernels.hpp>
#include <philap/variational.hpp>

#include <random>

using namespace philap;

namespace {

ProblemSpec bench_spec(int M, int N) {
  ProblemConfig c = preset("pendulum_anticoercive");
  c.M = M;
  c.N = N;
  return to_spec(c);
}

GridFunction random_curve(const ProblemSpec& s) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> d(-0.5 / std::sqrt(s.N), 0.5 / std::sqrt(s.N));
  GridFunction u = GridFunction::zeros(s.grid, s.N);
  for (int i = 1; i <= s.grid.M; ++i)
    for (int c = 0; c < s.N; ++c) u.values(i, c) = u.values(i - 1, c) + s.grid.dt() * d(rng);
  return u;
}

template <bool Parallel>
void BM_flux_and_jacobian(benchmark::State& state) {
  const ProblemSpec s = bench_spec(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  const NodeMat du = derivative(random_curve(s));
  for (auto _ : state) {
    if constexpr (Parallel) {
      benchmark::DoNotOptimize(kernels::midpoint_flux(s.phi, du));
      benchmark::DoNotOptimize(kernels::midpoint_jacobian(s.phi, du));
    } else {
      benchmark::DoNotOptimize(kernels::serial::midpoint_flux(s.phi, du));
      benchmark::DoNotOptimize(kernels::serial::midpoint_jacobian(s.phi, du));
    }
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void BM_node_terms(benchmark::State& state) {
  const ProblemSpec s = bench_spec(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  const GridFunction u = random_curve(s);
  for (auto _ : state) {
    if constexpr (Parallel) {
      benchmark::DoNotOptimize(kernels::node_gradient(s, u));
      benchmark::DoNotOptimize(kernels::node_hessian(s, u));
    } else {
      benchmark::DoNotOptimize(kernels::serial::node_gradient(s, u));
      benchmark::DoNotOptimize(kernels::serial::node_hessian(s, u));
    }
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_minimize_pendulum(benchmark::State& state) {
  const ProblemSpec s = bench_spec(static_cast<int>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(minimize_energy(s, default_init(s)));
}

void sizes(benchmark::internal::Benchmark* b) {
  for (int M : {800, 8000, 80000})
    for (int N : {1, 3}) b->Args({M, N});
}

}  // namespace

BENCHMARK_TEMPLATE(BM_flux_and_jacobian, false)->Apply(sizes)->Name("flux_jacobian/serial");
BENCHMARK_TEMPLATE(BM_flux_and_jacobian, true)->Apply(sizes)->Name("flux_jacobian/openmp");
BENCHMARK_TEMPLATE(BM_node_terms, false)->Apply(sizes)->Name("node_terms/serial");
BENCHMARK_TEMPLATE(BM_node_terms, true)->Apply(sizes)->Name("node_terms/openmp");
BENCHMARK(BM_minimize_pendulum)->Arg(800)->Arg(3200)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
