#include <doctest.h>

#include <cstdint>
#include <limits>
#include <memory>
#include <random>

#include "support/oracles.hpp"
#include "zdlab/deploy.hpp"
#include "zdlab/error.hpp"

using namespace zdlab;

namespace {

std::shared_ptr<const Graph> share(Graph g) {
  return std::make_shared<const Graph>(std::move(g));
}

// Random graph with every degree raised to at least two, as the mesh
// generator does.
std::shared_ptr<const Graph> repaired(std::size_t n, double p, std::uint64_t seed) {
  return share(generate(Topology::Mesh, n, seed, p));
}

GAConfig small_ga(std::uint64_t seed) {
  GAConfig cfg;
  cfg.population_size = 40;
  cfg.generations = 60;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("binomial") {
  CHECK(binomial(5, 2) == 10);
  CHECK(binomial(80, 0) == 1);
  CHECK(binomial(3, 4) == 0);
  CHECK(binomial(80, 10) == 1646492110120ull);
  CHECK(binomial(1000, 500) == std::numeric_limits<std::uint64_t>::max());
}

TEST_CASE("top k breaks ties by lower id") {
  CHECK(top_k({1, 3, 3, 2}, 2) == std::vector<NodeId>{1, 2});
  CHECK(top_k({5, 5, 5}, 2) == std::vector<NodeId>{0, 1});
  CHECK(top_k({1, 2}, 5) == std::vector<NodeId>{0, 1});
}

TEST_CASE("chromosome encoding") {
  Chromosome c;
  c.bits = {1, 0, 1, 0, 0};
  CHECK(c.zd_count() == 3);
  CHECK(c.zd_set() == std::vector<NodeId>{1, 3, 4});
}

TEST_CASE("exhaustive search") {
  const auto star = share(generate(Topology::Star, 80, 0));
  const auto best = optimize_exhaustive(star, 1, PayoffScale{});
  CHECK(best.deployment.zd_set == std::vector<NodeId>{0});
  CHECK(best.objective == doctest::Approx(57.753627711770385));
  // Every ring placement ties; the smallest set wins.
  const auto ring = optimize_exhaustive(share(generate(Topology::Ring, 6, 0)), 1, {});
  CHECK(ring.deployment.zd_set == std::vector<NodeId>{0});
  CHECK(ring.objective == doctest::Approx(1.8068242641099852));
  const auto full = optimize_exhaustive(share(generate(Topology::Ring, 6, 0)), 6, {});
  CHECK(full.objective == 0.0);
  CHECK_THROWS_AS(optimize_exhaustive(star, 10, PayoffScale{}), RefusalError);
  CHECK_NOTHROW(optimize_exhaustive(star, 2, PayoffScale{}, 3160));
  CHECK_THROWS_AS(optimize_exhaustive(star, 2, PayoffScale{}, 3159), RefusalError);
  CHECK_THROWS_AS(optimize_exhaustive(star, 81, PayoffScale{}), DomainError);
}

TEST_CASE("GA configuration checks") {
  const auto g = share(generate(Topology::Ring, 10, 0));
  GAConfig cfg;
  CHECK_THROWS_AS(optimize_ga(g, 0, {}, cfg), DomainError);
  CHECK_THROWS_AS(optimize_ga(g, 10, {}, cfg), DomainError);
  cfg.population_size = 1;
  CHECK_THROWS_AS(optimize_ga(g, 2, {}, cfg), DomainError);
  cfg = {};
  cfg.crossover_rate = 1.5;
  CHECK_THROWS_AS(optimize_ga(g, 2, {}, cfg), DomainError);
  cfg = {};
  cfg.mutation_rate = -0.1;
  CHECK_THROWS_AS(optimize_ga(g, 2, {}, cfg), DomainError);
  cfg = {};
  cfg.elitism_count = 101;
  CHECK_THROWS_AS(optimize_ga(g, 2, {}, cfg), DomainError);
}

TEST_CASE("GA finds the star hub and keeps exactly K nodes") {
  const auto star = share(generate(Topology::Star, 80, 0));
  for (std::size_t K = 1; K <= 10; ++K) {
    const auto res = optimize_ga(star, K, {}, small_ga(K));
    CHECK(res.deployment.zd_set.size() == K);
    CHECK(res.deployment.zd_set.front() == 0);
    CHECK(res.objective / static_cast<double>(80 - K) == doctest::Approx(0.7310585786300049));
  }
}

TEST_CASE("GA history is monotone and the run is reproducible") {
  const auto g = repaired(40, 0.1, 3);
  const auto a = optimize_ga(g, 4, {}, small_ga(9));
  const auto b = optimize_ga(g, 4, {}, small_ga(9));
  CHECK(a.history.size() == 61);
  for (std::size_t i = 1; i < a.history.size(); ++i) CHECK(a.history[i] >= a.history[i - 1]);
  CHECK(a.history == b.history);
  CHECK(a.deployment.zd_set == b.deployment.zd_set);
  CHECK(a.objective == doctest::Approx(a.history.back()));
}

TEST_CASE("GA reaches the exhaustive optimum on small graphs") {
  int hits = 0, runs = 0;
  for (std::uint64_t inst = 1; inst <= 8; ++inst) {
    const auto g = repaired(12, 0.3, inst);
    for (std::size_t K = 1; K <= 3; ++K) {
      const double best = optimize_exhaustive(g, K, {}).objective;
      const auto res = optimize_ga(g, K, {}, small_ga(inst * 10 + K));
      CHECK(res.objective <= best + 1e-9);
      ++runs;
      if (res.objective >= 0.99 * best) ++hits;
    }
  }
  CHECK(hits == runs);
}
