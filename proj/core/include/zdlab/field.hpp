#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "zdlab/game.hpp"
#include "zdlab/graph.hpp"

namespace zdlab {

struct Deployment {
  std::shared_ptr<const Graph> graph;
  std::vector<NodeId> zd_set;  // sorted, distinct
  PayoffScale scale;

  // Throws DomainError on out-of-range or repeated ids.
  void validate() const;
  std::vector<std::uint8_t> zd_mask() const;
};

double logistic(double x) noexcept;

// Log-odds of cooperating for a regular node with nA ZD neighbors. The
// regular game contributes -1 whenever the node has a regular neighbor; the
// ZD game (nA members plus this node) contributes the gap between the
// alliance's reward and punishment.
double node_delta(int zd_neighbors, bool has_regular_neighbors, const PayoffScale& scale);

struct NodeField {
  bool is_zd = false;
  int zd_neighbors = 0;
  bool has_regular_neighbors = false;
  double delta = 0.0;
  double q = 1.0;  // ZD nodes are reported as sure cooperators
};

struct FieldResult {
  std::vector<NodeField> nodes;
  double objective = 0.0;     // sum of q over regular nodes
  double mean_regular = 0.0;  // objective / (V - K), 0 when no regular node
  std::size_t zd_count = 0;
};

FieldResult evaluate(const Deployment& dep);

// Lookup of q by (zd_neighbors, has_regular_neighbors) for one scale; the
// optimizer's fitness function.
class FieldEvaluator {
 public:
  FieldEvaluator(const Graph& g, const PayoffScale& scale);

  // Objective for a 0/1 ZD mask of length V.
  double objective(std::span<const std::uint8_t> is_zd) const;
  double q(int zd_neighbors, bool has_regular_neighbors) const;

 private:
  const Graph* graph_;
  std::vector<double> q_alone_;     // indexed by zd_neighbors
  std::vector<double> q_regular_;   // same, with regular neighbors present
  mutable std::vector<int> counts_;
};

enum class RatioMode { Expected, MonteCarlo };

// Fraction of cooperators in the whole system, ZD players counted as
// cooperators.
double cooperator_ratio(const Deployment& dep, RatioMode mode, long rounds = 0,
                        std::uint64_t seed = 0);

}  // namespace zdlab
