#include "zdlab/field.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "zdlab/error.hpp"

namespace zdlab {

void Deployment::validate() const {
  if (!graph) throw DomainError("deployment has no graph");
  std::vector<NodeId> ids = zd_set;
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end())
    throw DomainError("deployment: repeated ZD node");
  if (!ids.empty() && ids.back() >= graph->node_count())
    throw DomainError("deployment: ZD node out of range");
}

std::vector<std::uint8_t> Deployment::zd_mask() const {
  std::vector<std::uint8_t> mask(graph->node_count(), 0);
  for (NodeId v : zd_set) mask.at(v) = 1;
  return mask;
}

double logistic(double x) noexcept {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double node_delta(int zd_neighbors, bool has_regular_neighbors, const PayoffScale& scale) {
  if (zd_neighbors < 0) throw DomainError("node_delta: negative ZD neighbor count");
  const double regular = has_regular_neighbors ? -1.0 : 0.0;
  if (zd_neighbors == 0) return regular;
  const int nA = zd_neighbors;
  const int N = nA + 1;
  const double r = scale(N);
  const double reward = r * nA / N + 1.0;
  const double punishment = r * (N - nA) / N;
  return regular + (reward - punishment);
}

FieldResult evaluate(const Deployment& dep) {
  dep.validate();
  const Graph& g = *dep.graph;
  const auto mask = dep.zd_mask();
  FieldResult res;
  res.nodes.resize(g.node_count());
  std::size_t regular = 0;
  for (NodeId v = 0; v < g.node_count(); ++v) {
    NodeField& nf = res.nodes[v];
    if (mask[v]) {
      nf.is_zd = true;
      ++res.zd_count;
      continue;
    }
    for (NodeId w : g.neighbors(v)) {
      if (mask[w])
        ++nf.zd_neighbors;
      else
        nf.has_regular_neighbors = true;
    }
    nf.delta = node_delta(nf.zd_neighbors, nf.has_regular_neighbors, dep.scale);
    nf.q = logistic(nf.delta);
    res.objective += nf.q;
    ++regular;
  }
  res.mean_regular = regular ? res.objective / static_cast<double>(regular) : 0.0;
  return res;
}

FieldEvaluator::FieldEvaluator(const Graph& g, const PayoffScale& scale)
    : graph_(&g), counts_(g.node_count(), 0) {
  std::size_t max_deg = 0;
  for (NodeId v = 0; v < g.node_count(); ++v) max_deg = std::max(max_deg, g.degree(v));
  for (std::size_t k = 0; k <= max_deg; ++k) {
    q_alone_.push_back(logistic(node_delta(static_cast<int>(k), false, scale)));
    q_regular_.push_back(logistic(node_delta(static_cast<int>(k), true, scale)));
  }
}

double FieldEvaluator::q(int zd_neighbors, bool has_regular_neighbors) const {
  const auto k = static_cast<std::size_t>(zd_neighbors);
  return has_regular_neighbors ? q_regular_.at(k) : q_alone_.at(k);
}

double FieldEvaluator::objective(std::span<const std::uint8_t> is_zd) const {
  const Graph& g = *graph_;
  const std::size_t n = g.node_count();
  std::fill(counts_.begin(), counts_.end(), 0);
  for (NodeId v = 0; v < n; ++v)
    if (is_zd[v])
      for (NodeId w : g.neighbors(v)) ++counts_[w];
  double total = 0.0;
  for (NodeId v = 0; v < n; ++v) {
    if (is_zd[v]) continue;
    const int k = counts_[v];
    const bool has_regular = static_cast<std::size_t>(k) < g.degree(v);
    total += has_regular ? q_regular_[static_cast<std::size_t>(k)]
                         : q_alone_[static_cast<std::size_t>(k)];
  }
  return total;
}

double cooperator_ratio(const Deployment& dep, RatioMode mode, long rounds, std::uint64_t seed) {
  const FieldResult field = evaluate(dep);
  const double V = static_cast<double>(dep.graph->node_count());
  if (V == 0) return 0.0;
  const double K = static_cast<double>(field.zd_count);
  if (mode == RatioMode::Expected) return (K + field.objective) / V;

  if (rounds < 1) throw DomainError("monte carlo ratio needs rounds >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double sum = 0.0;
  for (long t = 0; t < rounds; ++t) {
    std::size_t coop = field.zd_count;
    for (const auto& nf : field.nodes)
      if (!nf.is_zd && unit(rng) < nf.q) ++coop;
    sum += static_cast<double>(coop) / V;
  }
  return sum / static_cast<double>(rounds);
}

}  // namespace zdlab
