#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "zdlab/field.hpp"
#include "zdlab/graph.hpp"

namespace zdlab {

struct GAConfig {
  std::size_t population_size = 100;
  std::size_t generations = 300;
  std::size_t tournament_size = 3;
  double crossover_rate = 0.9;
  std::optional<double> mutation_rate;  // per gene; 1/V when unset
  std::size_t elitism_count = 2;
  std::uint64_t seed = 1;

  void validate() const;
};

// Placement encoding: bits[v] == 0 marks node v as a ZD player, 1 as regular.
struct Chromosome {
  std::vector<std::uint8_t> bits;
  double fitness = 0.0;

  std::size_t zd_count() const;
  std::vector<NodeId> zd_set() const;
};

struct OptimizeResult {
  Deployment deployment;
  double objective = 0.0;
  std::vector<double> history;  // best objective after each generation, initial first
};

OptimizeResult optimize_ga(std::shared_ptr<const Graph> g, std::size_t K,
                           const PayoffScale& scale, const GAConfig& cfg);

inline constexpr std::uint64_t kDefaultExhaustiveCap = 2'000'000;

// Exact optimum by enumerating every K-subset in lexicographic order; ties go
// to the lexicographically smallest set. Throws RefusalError above `cap`
// subsets.
OptimizeResult optimize_exhaustive(std::shared_ptr<const Graph> g, std::size_t K,
                                   const PayoffScale& scale,
                                   std::uint64_t cap = kDefaultExhaustiveCap);

// C(n, k), saturating at UINT64_MAX.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

// The K highest-scoring nodes, ties broken by lower id.
std::vector<NodeId> top_k(const std::vector<double>& score, std::size_t K);

}  // namespace zdlab
