#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace zdlab {

using NodeId = std::uint32_t;

// Simple undirected graph on nodes 0..V-1. Immutable once built.
class Graph {
 public:
  Graph() = default;
  // Throws ConstructionError on self-loops, duplicate edges or ids >= V.
  Graph(std::size_t node_count, std::vector<std::pair<NodeId, NodeId>> edges);

  std::size_t node_count() const noexcept { return adj_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  const std::vector<NodeId>& neighbors(NodeId v) const { return adj_.at(v); }
  std::size_t degree(NodeId v) const { return adj_.at(v).size(); }
  bool has_edge(NodeId u, NodeId v) const;
  // Edges as (min, max) pairs in insertion order.
  const std::vector<std::pair<NodeId, NodeId>>& edges() const noexcept { return edges_; }
  bool connected() const;

 private:
  std::vector<std::vector<NodeId>> adj_;
  std::vector<std::pair<NodeId, NodeId>> edges_;
};

enum class Topology { Star, Ring, Tree, Mesh };

Topology parse_topology(const std::string& name);
std::string to_string(Topology t);

inline constexpr double kDefaultMeshDensity = 0.49;

// star: node 0 is the hub. ring: single cycle 0-1-...-(n-1)-0. tree: complete
// binary tree with children 2i+1, 2i+2. mesh: each edge present with
// probability `mesh_density`, then every node of degree < 2 is joined to
// random non-neighbors until it has two.
Graph generate(Topology topology, std::size_t n, std::uint64_t seed,
               std::optional<double> mesh_density = std::nullopt);

struct TraceRecord {
  std::string node_a;
  std::string node_b;
  std::optional<double> start;
  std::optional<double> end;
  std::size_t count = 1;
};

// Whitespace- or comma-delimited contacts "a b [start end ...]"; '#' lines
// and blank lines are skipped. Throws ParseError with the line number.
std::vector<TraceRecord> parse_trace(std::istream& in);

struct IngestedGraph {
  Graph graph;
  std::vector<std::string> labels;  // labels[id] is the external label
};

// Nodes are the distinct labels in first-appearance order; an edge exists
// when a pair has at least `min_contacts` contacts.
IngestedGraph ingest_trace(const std::vector<TraceRecord>& records, std::size_t min_contacts);

// Graph file: "V <count>" then one "u v" edge per line; '#' comments.
Graph read_graph(std::istream& in);
void write_graph(std::ostream& out, const Graph& g);

struct DegreeStats {
  std::vector<std::size_t> degrees;
  double mean = 0.0;
};

DegreeStats degree_stats(const Graph& g);

// Unnormalized shortest-path betweenness; each unordered pair contributes
// once, split evenly across equal-length shortest paths.
std::vector<double> betweenness(const Graph& g);

}  // namespace zdlab
