#include "zdlab/deploy.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>

#include "zdlab/error.hpp"

namespace zdlab {

void GAConfig::validate() const {
  if (population_size < 2) throw DomainError("GA: population_size must be >= 2");
  if (tournament_size < 1) throw DomainError("GA: tournament_size must be >= 1");
  if (!(crossover_rate >= 0.0 && crossover_rate <= 1.0))
    throw DomainError("GA: crossover_rate must lie in [0, 1]");
  if (mutation_rate && !(*mutation_rate >= 0.0 && *mutation_rate <= 1.0))
    throw DomainError("GA: mutation_rate must lie in [0, 1]");
  if (elitism_count > population_size)
    throw DomainError("GA: elitism_count exceeds population_size");
}

std::size_t Chromosome::zd_count() const {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{0}));
}

std::vector<NodeId> Chromosome::zd_set() const {
  std::vector<NodeId> out;
  for (std::size_t v = 0; v < bits.size(); ++v)
    if (!bits[v]) out.push_back(static_cast<NodeId>(v));
  return out;
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t c = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    const std::uint64_t num = n - k + i;
    // c * num / i is exact at each step; bail out before overflow.
    const std::uint64_t g = std::gcd(c, i);
    const std::uint64_t c_red = c / g;
    const std::uint64_t i_red = i / g;
    const std::uint64_t num_red = num / i_red;
    if (num_red != 0 && c_red > std::numeric_limits<std::uint64_t>::max() / num_red)
      return std::numeric_limits<std::uint64_t>::max();
    c = c_red * num_red;
  }
  return c;
}

std::vector<NodeId> top_k(const std::vector<double>& score, std::size_t K) {
  std::vector<NodeId> ids(score.size());
  std::iota(ids.begin(), ids.end(), NodeId{0});
  std::stable_sort(ids.begin(), ids.end(),
                   [&](NodeId a, NodeId b) { return score[a] > score[b]; });
  ids.resize(std::min(K, ids.size()));
  std::sort(ids.begin(), ids.end());
  return ids;
}

namespace {

class Ga {
 public:
  Ga(const Graph& g, std::size_t K, const PayoffScale& scale, const GAConfig& cfg)
      : g_(g), K_(K), cfg_(cfg), eval_(g, scale), rng_(cfg.seed),
        mutation_(cfg.mutation_rate.value_or(1.0 / static_cast<double>(g.node_count()))),
        mask_(g.node_count()) {}

  Chromosome from_set(const std::vector<NodeId>& zd) {
    Chromosome c;
    c.bits.assign(g_.node_count(), 1);
    for (NodeId v : zd) c.bits[v] = 0;
    score(c);
    return c;
  }

  Chromosome random_individual() {
    std::vector<NodeId> ids(g_.node_count());
    std::iota(ids.begin(), ids.end(), NodeId{0});
    std::shuffle(ids.begin(), ids.end(), rng_);
    ids.resize(K_);
    return from_set(ids);
  }

  void score(Chromosome& c) {
    for (std::size_t v = 0; v < c.bits.size(); ++v) mask_[v] = c.bits[v] ? 0 : 1;
    c.fitness = eval_.objective(mask_);
  }

  const Chromosome& tournament(const std::vector<Chromosome>& pop) {
    std::uniform_int_distribution<std::size_t> pick(0, pop.size() - 1);
    const Chromosome* best = &pop[pick(rng_)];
    for (std::size_t t = 1; t < cfg_.tournament_size; ++t) {
      const Chromosome* c = &pop[pick(rng_)];
      if (c->fitness > best->fitness) best = c;
    }
    return *best;
  }

  Chromosome breed(const Chromosome& a, const Chromosome& b) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Chromosome child = a;
    if (unit(rng_) < cfg_.crossover_rate)
      for (std::size_t v = 0; v < child.bits.size(); ++v)
        if (unit(rng_) < 0.5) child.bits[v] = b.bits[v];
    for (auto& gene : child.bits)
      if (unit(rng_) < mutation_) gene ^= 1u;
    repair(child);
    score(child);
    return child;
  }

  // Flip randomly chosen bits until exactly K zeros remain.
  void repair(Chromosome& c) {
    std::vector<std::size_t> zd, regular;
    for (std::size_t v = 0; v < c.bits.size(); ++v) (c.bits[v] ? regular : zd).push_back(v);
    if (zd.size() > K_) {
      std::shuffle(zd.begin(), zd.end(), rng_);
      for (std::size_t i = K_; i < zd.size(); ++i) c.bits[zd[i]] = 1;
    } else if (zd.size() < K_) {
      std::shuffle(regular.begin(), regular.end(), rng_);
      for (std::size_t i = 0; i < K_ - zd.size(); ++i) c.bits[regular[i]] = 0;
    }
  }

  OptimizeResult run(std::shared_ptr<const Graph> graph, const PayoffScale& scale) {
    std::vector<Chromosome> pop;
    pop.reserve(cfg_.population_size);
    std::vector<double> degree(g_.node_count());
    for (NodeId v = 0; v < g_.node_count(); ++v) degree[v] = static_cast<double>(g_.degree(v));
    pop.push_back(from_set(top_k(degree, K_)));
    pop.push_back(from_set(top_k(betweenness(g_), K_)));
    while (pop.size() < cfg_.population_size) pop.push_back(random_individual());

    const auto by_fitness = [](const Chromosome& a, const Chromosome& b) {
      return a.fitness > b.fitness;
    };
    std::stable_sort(pop.begin(), pop.end(), by_fitness);
    Chromosome best = pop.front();

    OptimizeResult out;
    out.history.reserve(cfg_.generations + 1);
    out.history.push_back(best.fitness);
    std::vector<Chromosome> next;
    next.reserve(cfg_.population_size);
    for (std::size_t gen = 0; gen < cfg_.generations; ++gen) {
      next.clear();
      for (std::size_t e = 0; e < cfg_.elitism_count; ++e) next.push_back(pop[e]);
      while (next.size() < cfg_.population_size) {
        const Chromosome& a = tournament(pop);
        const Chromosome& b = tournament(pop);
        next.push_back(breed(a, b));
      }
      pop.swap(next);
      std::stable_sort(pop.begin(), pop.end(), by_fitness);
      if (pop.front().fitness > best.fitness) best = pop.front();
      out.history.push_back(best.fitness);
    }

    out.objective = best.fitness;
    out.deployment = Deployment{std::move(graph), best.zd_set(), scale};
    return out;
  }

 private:
  const Graph& g_;
  std::size_t K_;
  GAConfig cfg_;
  FieldEvaluator eval_;
  std::mt19937_64 rng_;
  double mutation_;
  std::vector<std::uint8_t> mask_;
};

}  // namespace

OptimizeResult optimize_ga(std::shared_ptr<const Graph> g, std::size_t K,
                           const PayoffScale& scale, const GAConfig& cfg) {
  if (!g) throw DomainError("optimize_ga: null graph");
  cfg.validate();
  scale.validate();
  if (K < 1 || K >= g->node_count())
    throw DomainError("optimize_ga: K must satisfy 1 <= K < V");
  Ga ga(*g, K, scale, cfg);
  return ga.run(std::move(g), scale);
}

OptimizeResult optimize_exhaustive(std::shared_ptr<const Graph> g, std::size_t K,
                                   const PayoffScale& scale, std::uint64_t cap) {
  if (!g) throw DomainError("optimize_exhaustive: null graph");
  scale.validate();
  const std::size_t V = g->node_count();
  if (K > V) throw DomainError("optimize_exhaustive: K exceeds V");
  const std::uint64_t combos = binomial(V, K);
  if (combos > cap)
    throw RefusalError("optimize_exhaustive: C(" + std::to_string(V) + ", " +
                       std::to_string(K) + ") exceeds the cap of " + std::to_string(cap));

  FieldEvaluator eval(*g, scale);
  std::vector<std::uint8_t> mask(V, 0);
  std::vector<std::size_t> idx(K);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  double best = -1.0;
  std::vector<std::size_t> best_idx;
  // Lexicographic walk over K-subsets; strict improvement keeps the first
  // (smallest) set among near-equal objectives.
  while (true) {
    std::fill(mask.begin(), mask.end(), std::uint8_t{0});
    for (std::size_t i : idx) mask[i] = 1;
    const double obj = eval.objective(mask);
    if (obj > best + 1e-12) {
      best = obj;
      best_idx = idx;
    }
    std::size_t i = K;
    while (i > 0 && idx[i - 1] == V - K + (i - 1)) --i;
    if (i == 0) break;
    ++idx[i - 1];
    for (std::size_t j = i; j < K; ++j) idx[j] = idx[j - 1] + 1;
  }

  OptimizeResult out;
  out.objective = best;
  std::vector<NodeId> zd(best_idx.begin(), best_idx.end());
  out.deployment = Deployment{std::move(g), std::move(zd), scale};
  return out;
}

}  // namespace zdlab
