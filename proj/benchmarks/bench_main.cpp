#include <benchmark/benchmark.h>

#include <memory>
#include <vector>

#include "zdlab/alliance.hpp"
#include "zdlab/deploy.hpp"
#include "zdlab/field.hpp"
#include "zdlab/graph.hpp"
#include "zdlab/markov.hpp"

using namespace zdlab;

namespace {

TransitionMatrix zd_chain(int N) {
  const int nA = N / 2;
  const GameShape shape{N, N, nA, 2.0 * N};
  const auto range = feasible_l_range(0.5, shape);
  const auto g = payoff_vectors(shape);
  const auto res = synthesize({0.5, range.midpoint(), std::nullopt, shape}, g);
  std::vector<LeaderStrategy> leaders;
  for (int k = 0; k < nA; ++k) leaders.push_back(res.member_strategy(k));
  const auto out = uniform_outsiders(shape, 0.3);
  for (const auto& l : out.leaders) leaders.push_back(l);
  return build_transition_matrix(shape, leaders, out.followers, Coupling::SharedDraw);
}

void BM_Stationary(benchmark::State& state) {
  const auto M = zd_chain(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(stationary(M).residual);
}
BENCHMARK(BM_Stationary)->Arg(4)->Arg(6)->Arg(8);

void BM_ZdDeterminant(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const auto M = zd_chain(N);
  std::vector<double> f(M.entries.rows(), 1.0);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = static_cast<double>(i % 5);
  for (auto _ : state) benchmark::DoNotOptimize(zd_determinant(M, f, 0).ratio());
}
BENCHMARK(BM_ZdDeterminant)->Arg(4)->Arg(6)->Arg(8);

void BM_FieldObjective(benchmark::State& state) {
  const auto g = generate(Topology::Mesh, static_cast<std::size_t>(state.range(0)), 7);
  const FieldEvaluator eval(g, PayoffScale{});
  std::vector<std::uint8_t> mask(g.node_count(), 0);
  for (std::size_t v = 0; v < mask.size(); v += 10) mask[v] = 1;
  for (auto _ : state) benchmark::DoNotOptimize(eval.objective(mask));
}
BENCHMARK(BM_FieldObjective)->Arg(80)->Arg(400);

void BM_Betweenness(benchmark::State& state) {
  const auto g = generate(Topology::Mesh, static_cast<std::size_t>(state.range(0)), 7);
  for (auto _ : state) benchmark::DoNotOptimize(betweenness(g).data());
}
BENCHMARK(BM_Betweenness)->Arg(80)->Arg(200);

void BM_GaMesh80(benchmark::State& state) {
  auto g = std::make_shared<const Graph>(generate(Topology::Mesh, 80, 7));
  GAConfig cfg;
  cfg.generations = 50;
  for (auto _ : state)
    benchmark::DoNotOptimize(optimize_ga(g, static_cast<std::size_t>(state.range(0)),
                                         PayoffScale{}, cfg).objective);
}
BENCHMARK(BM_GaMesh80)->Arg(5)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
