#include "zdlab/graph.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <map>
#include <ostream>
#include <queue>
#include <random>
#include <unordered_map>

#include "zdlab/error.hpp"

namespace zdlab {

Graph::Graph(std::size_t node_count, std::vector<std::pair<NodeId, NodeId>> edges)
    : adj_(node_count) {
  edges_.reserve(edges.size());
  for (auto [u, v] : edges) {
    if (u >= node_count || v >= node_count)
      throw ConstructionError("edge (" + std::to_string(u) + ", " + std::to_string(v) +
                              ") references a missing node");
    if (u == v) throw ConstructionError("self-loop on node " + std::to_string(u));
    adj_[u].push_back(v);
    adj_[v].push_back(u);
    edges_.emplace_back(std::min(u, v), std::max(u, v));
  }
  for (auto& nb : adj_) {
    std::sort(nb.begin(), nb.end());
    if (std::adjacent_find(nb.begin(), nb.end()) != nb.end())
      throw ConstructionError("duplicate edge");
  }
}

bool Graph::has_edge(NodeId u, NodeId v) const {
  const auto& nb = adj_.at(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

bool Graph::connected() const {
  if (adj_.empty()) return true;
  std::vector<bool> seen(adj_.size(), false);
  std::vector<NodeId> todo{0};
  seen[0] = true;
  std::size_t reached = 1;
  while (!todo.empty()) {
    const NodeId u = todo.back();
    todo.pop_back();
    for (NodeId w : adj_[u])
      if (!seen[w]) {
        seen[w] = true;
        ++reached;
        todo.push_back(w);
      }
  }
  return reached == adj_.size();
}

Topology parse_topology(const std::string& name) {
  if (name == "star") return Topology::Star;
  if (name == "ring") return Topology::Ring;
  if (name == "tree") return Topology::Tree;
  if (name == "mesh") return Topology::Mesh;
  throw DomainError("unknown topology '" + name + "'");
}

std::string to_string(Topology t) {
  switch (t) {
    case Topology::Star: return "star";
    case Topology::Ring: return "ring";
    case Topology::Tree: return "tree";
    case Topology::Mesh: return "mesh";
  }
  return "?";
}

Graph generate(Topology topology, std::size_t n, std::uint64_t seed,
               std::optional<double> mesh_density) {
  const std::size_t min_n = topology == Topology::Ring ? 3 : 2;
  if (n < min_n)
    throw DomainError(to_string(topology) + " needs at least " + std::to_string(min_n) +
                      " nodes");
  if (mesh_density && !(*mesh_density > 0.0 && *mesh_density <= 1.0))
    throw DomainError("mesh density must lie in (0, 1]");

  std::vector<std::pair<NodeId, NodeId>> edges;
  const auto id = [](std::size_t i) { return static_cast<NodeId>(i); };
  switch (topology) {
    case Topology::Star:
      for (std::size_t i = 1; i < n; ++i) edges.emplace_back(0, id(i));
      break;
    case Topology::Ring:
      for (std::size_t i = 0; i < n; ++i) edges.emplace_back(id(i), id((i + 1) % n));
      break;
    case Topology::Tree:
      for (std::size_t i = 1; i < n; ++i) edges.emplace_back(id((i - 1) / 2), id(i));
      break;
    case Topology::Mesh: {
      const double density = mesh_density.value_or(kDefaultMeshDensity);
      std::mt19937_64 rng(seed);
      std::bernoulli_distribution coin(density);
      std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
      std::vector<std::size_t> deg(n, 0);
      const auto link = [&](std::size_t u, std::size_t v) {
        adj[u][v] = adj[v][u] = true;
        ++deg[u];
        ++deg[v];
        edges.emplace_back(id(u), id(v));
      };
      for (std::size_t u = 0; u < n; ++u)
        for (std::size_t v = u + 1; v < n; ++v)
          if (coin(rng)) link(u, v);
      // With n == 2 the only possible degree is 1.
      const std::size_t want = std::min<std::size_t>(2, n - 1);
      for (std::size_t u = 0; u < n; ++u) {
        while (deg[u] < want) {
          std::vector<std::size_t> candidates;
          for (std::size_t v = 0; v < n; ++v)
            if (v != u && !adj[u][v]) candidates.push_back(v);
          std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
          link(u, candidates[pick(rng)]);
        }
      }
      break;
    }
  }
  return Graph(n, std::move(edges));
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',' || c == ' ' || c == '\t' || c == '\r') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::optional<double> parse_double(const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<std::size_t> parse_size(const std::string& s) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

bool skippable(const std::string& line) {
  const auto first = line.find_first_not_of(" \t\r");
  return first == std::string::npos || line[first] == '#';
}

}  // namespace

std::vector<TraceRecord> parse_trace(std::istream& in) {
  std::vector<TraceRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (skippable(line)) continue;
    auto fields = split_fields(line);
    if (fields.size() != 2 && fields.size() < 4)
      throw ParseError("expected 'node_a node_b [start end]'", line_no);
    TraceRecord rec;
    rec.node_a = fields[0];
    rec.node_b = fields[1];
    if (rec.node_a == rec.node_b) throw ParseError("contact of a node with itself", line_no);
    if (fields.size() >= 4) {
      rec.start = parse_double(fields[2]);
      rec.end = parse_double(fields[3]);
      if (!rec.start || !rec.end) throw ParseError("non-numeric timestamp", line_no);
    }
    records.push_back(std::move(rec));
  }
  return records;
}

IngestedGraph ingest_trace(const std::vector<TraceRecord>& records, std::size_t min_contacts) {
  if (min_contacts < 1) throw DomainError("min_contacts must be >= 1");
  if (records.empty()) throw ParseError("trace is empty", 0);
  IngestedGraph out;
  std::unordered_map<std::string, NodeId> ids;
  const auto intern = [&](const std::string& label) {
    auto [it, inserted] = ids.try_emplace(label, static_cast<NodeId>(out.labels.size()));
    if (inserted) out.labels.push_back(label);
    return it->second;
  };
  // Ordered so the resulting edge list is deterministic.
  std::map<std::pair<NodeId, NodeId>, std::size_t> contacts;
  for (const auto& rec : records) {
    const NodeId a = intern(rec.node_a);
    const NodeId b = intern(rec.node_b);
    if (a == b) throw ParseError("contact of a node with itself", 0);
    contacts[{std::min(a, b), std::max(a, b)}] += rec.count;
  }
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (const auto& [pair, count] : contacts)
    if (count >= min_contacts) edges.push_back(pair);
  out.graph = Graph(out.labels.size(), std::move(edges));
  return out;
}

Graph read_graph(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::optional<std::size_t> count;
  std::vector<std::pair<NodeId, NodeId>> edges;
  while (std::getline(in, line)) {
    ++line_no;
    if (skippable(line)) continue;
    const auto fields = split_fields(line);
    if (!count) {
      if (fields.size() != 2 || fields[0] != "V")
        throw ParseError("expected header 'V <count>'", line_no);
      count = parse_size(fields[1]);
      if (!count) throw ParseError("bad node count", line_no);
      continue;
    }
    if (fields.size() != 2) throw ParseError("expected 'u v'", line_no);
    const auto u = parse_size(fields[0]);
    const auto v = parse_size(fields[1]);
    if (!u || !v) throw ParseError("non-integer node id", line_no);
    if (*u >= *count || *v >= *count) throw ParseError("node id out of range", line_no);
    edges.emplace_back(static_cast<NodeId>(*u), static_cast<NodeId>(*v));
  }
  if (!count) throw ParseError("missing 'V <count>' header", 0);
  try {
    return Graph(*count, std::move(edges));
  } catch (const ConstructionError& e) {
    throw ParseError(e.what(), 0);
  }
}

void write_graph(std::ostream& out, const Graph& g) {
  out << "V " << g.node_count() << '\n';
  for (auto [u, v] : g.edges()) out << u << ' ' << v << '\n';
}

DegreeStats degree_stats(const Graph& g) {
  DegreeStats st;
  st.degrees.reserve(g.node_count());
  for (NodeId v = 0; v < g.node_count(); ++v) st.degrees.push_back(g.degree(v));
  if (g.node_count() > 0)
    st.mean = 2.0 * static_cast<double>(g.edge_count()) / static_cast<double>(g.node_count());
  return st;
}

std::vector<double> betweenness(const Graph& g) {
  // Brandes' accumulation over BFS shortest-path DAGs.
  const std::size_t n = g.node_count();
  std::vector<double> bc(n, 0.0);
  std::vector<std::vector<NodeId>> preds(n);
  std::vector<double> sigma(n), delta(n);
  std::vector<long> dist(n);
  std::vector<NodeId> order;
  order.reserve(n);
  for (NodeId s = 0; s < n; ++s) {
    for (std::size_t i = 0; i < n; ++i) {
      preds[i].clear();
      sigma[i] = 0.0;
      delta[i] = 0.0;
      dist[i] = -1;
    }
    order.clear();
    sigma[s] = 1.0;
    dist[s] = 0;
    std::queue<NodeId> q;
    q.push(s);
    while (!q.empty()) {
      const NodeId u = q.front();
      q.pop();
      order.push_back(u);
      for (NodeId w : g.neighbors(u)) {
        if (dist[w] < 0) {
          dist[w] = dist[u] + 1;
          q.push(w);
        }
        if (dist[w] == dist[u] + 1) {
          sigma[w] += sigma[u];
          preds[w].push_back(u);
        }
      }
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const NodeId w = *it;
      for (NodeId u : preds[w]) delta[u] += sigma[u] / sigma[w] * (1.0 + delta[w]);
      if (w != s) bc[w] += delta[w];
    }
  }
  // Every unordered pair was visited from both endpoints.
  for (double& x : bc) x *= 0.5;
  return bc;
}

}  // namespace zdlab
