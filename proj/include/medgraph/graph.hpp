#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace medgraph {

using VertexId = std::uint32_t;
using EdgeId = std::uint32_t;
using ClassId = std::uint32_t;
using Dist = std::int64_t;

inline constexpr VertexId kNoVertex = std::numeric_limits<VertexId>::max();
inline constexpr Dist kUnreached = -1;
inline constexpr Dist kMaxWeight = Dist{1} << 40;

// Raised for inputs that are not simple, connected, bipartite graphs.
class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a structural property of median graphs fails.
class NotMedianGraph : public GraphError {
 public:
  explicit NotMedianGraph(const std::string& what)
      : GraphError("not a median graph: " + what) {}
};

struct Edge {
  VertexId u;
  VertexId v;
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

struct Neighbor {
  VertexId vertex;
  EdgeId edge;
};

enum class Validation { kOff, kOn };

class Graph {
 public:
  Graph() = default;

  // Edges are normalized to u < v and sorted; edge ids follow that order.
  // Loops and parallel edges are always rejected. Connectivity and
  // bipartiteness are checked only with Validation::kOn.
  static Graph from_edges(VertexId n, std::vector<Edge> edges,
                          Validation validation = Validation::kOn) {
    Graph g;
    g.n_ = n;
    for (auto& e : edges) {
      if (e.u >= n || e.v >= n) throw GraphError("edge endpoint out of range");
      if (e.u == e.v) throw GraphError("loop at vertex " + std::to_string(e.u));
      if (e.u > e.v) std::swap(e.u, e.v);
    }
    std::sort(edges.begin(), edges.end());
    if (std::adjacent_find(edges.begin(), edges.end()) != edges.end()) {
      throw GraphError("parallel edge");
    }
    g.edges_ = std::move(edges);
    g.build_adjacency();
    if (validation == Validation::kOn) g.validate();
    return g;
  }

  VertexId vertex_count() const { return n_; }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(EdgeId e) const { return edges_.at(e); }

  std::span<const Neighbor> neighbors(VertexId v) const {
    return {adjacency_.data() + offsets_[v], adjacency_.data() + offsets_[v + 1]};
  }
  std::size_t degree(VertexId v) const { return offsets_[v + 1] - offsets_[v]; }

  // Edge id joining u and v, or kNoEdge.
  static constexpr EdgeId kNoEdge = std::numeric_limits<EdgeId>::max();
  EdgeId find_edge(VertexId u, VertexId v) const {
    auto nb = neighbors(u);
    auto it = std::lower_bound(nb.begin(), nb.end(), v,
                               [](const Neighbor& a, VertexId x) { return a.vertex < x; });
    return (it != nb.end() && it->vertex == v) ? it->edge : kNoEdge;
  }

  // Non-fatal findings from validation (density above n log2 n).
  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  void build_adjacency() {
    offsets_.assign(std::size_t{n_} + 1, 0);
    for (const auto& e : edges_) {
      ++offsets_[e.u + 1];
      ++offsets_[e.v + 1];
    }
    std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
    adjacency_.resize(2 * edges_.size());
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    // Edges are sorted by (u, v); visiting them in order yields sorted lists
    // for the u side. The v side needs a final sort.
    for (EdgeId id = 0; id < edges_.size(); ++id) {
      const auto& e = edges_[id];
      adjacency_[fill[e.u]++] = {e.v, id};
      adjacency_[fill[e.v]++] = {e.u, id};
    }
    for (VertexId v = 0; v < n_; ++v) {
      std::sort(adjacency_.begin() + offsets_[v], adjacency_.begin() + offsets_[v + 1],
                [](const Neighbor& a, const Neighbor& b) { return a.vertex < b.vertex; });
    }
  }

  void validate() {
    if (n_ == 0) throw GraphError("graph has no vertices");
    std::vector<int> color(n_, -1);
    std::vector<VertexId> queue{0};
    color[0] = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      VertexId v = queue[head];
      for (const auto& nb : neighbors(v)) {
        if (color[nb.vertex] < 0) {
          color[nb.vertex] = 1 - color[v];
          queue.push_back(nb.vertex);
        } else if (color[nb.vertex] == color[v]) {
          throw GraphError("graph is not bipartite (odd cycle through edge " +
                           std::to_string(nb.edge) + ")");
        }
      }
    }
    if (queue.size() != n_) throw GraphError("graph is not connected");
    if (n_ >= 2 && static_cast<double>(edges_.size()) > n_ * std::log2(static_cast<double>(n_))) {
      warnings_.push_back("edge count exceeds n*log2(n); cannot be a median graph");
    }
  }

  VertexId n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_{0};
  std::vector<Neighbor> adjacency_;
  std::vector<std::string> warnings_;
};

// Nonnegative vertex weights capped at 2^40.
class VertexWeights {
 public:
  VertexWeights() = default;
  explicit VertexWeights(std::vector<Dist> values) : values_(std::move(values)) {
    for (Dist w : values_) {
      if (w < 0) throw std::invalid_argument("negative vertex weight");
      if (w > kMaxWeight) throw std::invalid_argument("vertex weight above 2^40");
    }
  }
  static VertexWeights zeros(VertexId n) { return VertexWeights(std::vector<Dist>(n, 0)); }

  std::size_t size() const { return values_.size(); }
  Dist operator[](VertexId v) const { return values_[v]; }
  std::span<const Dist> values() const { return values_; }

 private:
  std::vector<Dist> values_;
};

inline void check_vertex(const Graph& g, VertexId v) {
  if (v >= g.vertex_count()) {
    throw std::out_of_range("vertex id " + std::to_string(v) + " out of range");
  }
}

inline std::vector<Dist> bfs_distances(const Graph& g, VertexId source) {
  check_vertex(g, source);
  std::vector<Dist> dist(g.vertex_count(), kUnreached);
  std::vector<VertexId> queue;
  queue.reserve(g.vertex_count());
  queue.push_back(source);
  dist[source] = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    VertexId v = queue[head];
    for (const auto& nb : g.neighbors(v)) {
      if (dist[nb.vertex] == kUnreached) {
        dist[nb.vertex] = dist[v] + 1;
        queue.push_back(nb.vertex);
      }
    }
  }
  return dist;
}

struct GateAssignment {
  std::vector<VertexId> gate;  // kNoVertex where unreached (masked runs only)
  std::vector<Dist> dist;      // kUnreached where unreached
};

// Multi-source BFS seeded with every vertex of `seeds`. When `allowed` is
// non-empty the search stays inside vertices with allowed[v] != 0; seeds must
// be allowed.
inline GateAssignment gated_bfs(const Graph& g, std::span<const VertexId> seeds,
                                std::span<const std::uint8_t> allowed = {}) {
  if (seeds.empty()) throw std::invalid_argument("gated_bfs: empty seed set");
  const VertexId n = g.vertex_count();
  GateAssignment out{std::vector<VertexId>(n, kNoVertex), std::vector<Dist>(n, kUnreached)};
  std::vector<VertexId> queue;
  queue.reserve(n);
  for (VertexId s : seeds) {
    check_vertex(g, s);
    if (out.dist[s] == 0) continue;
    out.gate[s] = s;
    out.dist[s] = 0;
    queue.push_back(s);
  }
  const bool masked = !allowed.empty();
  for (std::size_t head = 0; head < queue.size(); ++head) {
    VertexId v = queue[head];
    for (const auto& nb : g.neighbors(v)) {
      VertexId x = nb.vertex;
      if (out.dist[x] != kUnreached || (masked && !allowed[x])) continue;
      out.dist[x] = out.dist[v] + 1;
      out.gate[x] = out.gate[v];
      queue.push_back(x);
    }
  }
  return out;
}

struct SubgraphMap {
  Graph graph;
  std::vector<VertexId> to_parent;    // child id -> parent id
  std::vector<VertexId> from_parent;  // parent id -> child id or kNoVertex
  std::vector<EdgeId> edge_to_parent;
};

// Induced subgraph on `subset` (any order, no duplicates). Child ids follow
// ascending parent ids.
inline SubgraphMap induced_subgraph(const Graph& g, std::span<const VertexId> subset) {
  if (subset.empty()) throw std::invalid_argument("induced_subgraph: empty subset");
  SubgraphMap map;
  map.to_parent.assign(subset.begin(), subset.end());
  std::sort(map.to_parent.begin(), map.to_parent.end());
  map.from_parent.assign(g.vertex_count(), kNoVertex);
  for (VertexId i = 0; i < map.to_parent.size(); ++i) {
    VertexId p = map.to_parent[i];
    check_vertex(g, p);
    if (map.from_parent[p] != kNoVertex) throw std::invalid_argument("duplicate vertex in subset");
    map.from_parent[p] = i;
  }
  std::vector<Edge> edges;
  for (VertexId i = 0; i < map.to_parent.size(); ++i) {
    for (const auto& nb : g.neighbors(map.to_parent[i])) {
      VertexId j = map.from_parent[nb.vertex];
      if (j != kNoVertex && i < j) {
        edges.push_back({i, j});
        map.edge_to_parent.push_back(nb.edge);
      }
    }
  }
  // Child ids are monotone in parent ids, and edges were emitted in (i, j)
  // order, so from_edges keeps this order and edge_to_parent stays aligned.
  map.graph = Graph::from_edges(static_cast<VertexId>(map.to_parent.size()), std::move(edges),
                                Validation::kOff);
  auto reach = bfs_distances(map.graph, 0);
  if (std::find(reach.begin(), reach.end(), kUnreached) != reach.end()) {
    throw std::invalid_argument("induced_subgraph: subset is not connected");
  }
  return map;
}

// ---- text formats ----------------------------------------------------------

namespace detail {

inline bool parse_u64(const std::string& tok, std::uint64_t& out) {
  if (tok.empty() || tok.size() > 19) return false;
  out = 0;
  for (char c : tok) {
    if (c < '0' || c > '9') return false;
    out = out * 10 + static_cast<std::uint64_t>(c - '0');
  }
  return true;
}

// Splits a line on single spaces; rejects empty tokens.
inline std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> toks;
  std::string cur;
  for (char c : line) {
    if (c == ' ') {
      toks.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  toks.push_back(cur);
  return toks;
}

inline std::vector<std::uint64_t> parse_numbers(const std::string& line, std::size_t expected,
                                                std::size_t line_no) {
  auto toks = split_line(line);
  std::vector<std::uint64_t> out;
  for (const auto& t : toks) {
    std::uint64_t x;
    if (!parse_u64(t, x)) {
      throw GraphError("line " + std::to_string(line_no) + ": malformed number '" + t + "'");
    }
    out.push_back(x);
  }
  if (expected && out.size() != expected) {
    throw GraphError("line " + std::to_string(line_no) + ": expected " + std::to_string(expected) +
                     " fields");
  }
  return out;
}

}  // namespace detail

inline void write_graph(std::ostream& os, const Graph& g) {
  os << g.vertex_count() << ' ' << g.edge_count() << '\n';
  for (const auto& e : g.edges()) os << e.u << ' ' << e.v << '\n';
}

inline Graph read_graph(std::istream& is, Validation validation = Validation::kOn) {
  std::string line;
  if (!std::getline(is, line)) throw GraphError("empty graph file");
  auto header = detail::parse_numbers(line, 2, 1);
  if (header[0] > std::numeric_limits<VertexId>::max() / 2) throw GraphError("n too large");
  const auto n = static_cast<VertexId>(header[0]);
  const std::uint64_t m = header[1];
  std::vector<Edge> edges;
  edges.reserve(m);
  for (std::uint64_t i = 0; i < m; ++i) {
    if (!std::getline(is, line)) throw GraphError("truncated edge list");
    auto uv = detail::parse_numbers(line, 2, i + 2);
    if (uv[0] >= uv[1] || uv[1] >= n) {
      throw GraphError("line " + std::to_string(i + 2) + ": expected 0 <= u < v < n");
    }
    Edge e{static_cast<VertexId>(uv[0]), static_cast<VertexId>(uv[1])};
    if (!edges.empty() && !(edges.back() < e)) {
      throw GraphError("line " + std::to_string(i + 2) + ": edges not strictly sorted");
    }
    edges.push_back(e);
  }
  while (std::getline(is, line)) {
    if (!line.empty()) throw GraphError("trailing content after edge list");
  }
  return Graph::from_edges(n, std::move(edges), validation);
}

inline void write_weights(std::ostream& os, const VertexWeights& w) {
  for (Dist x : w.values()) os << x << '\n';
}

inline VertexWeights read_weights(std::istream& is, VertexId n) {
  std::vector<Dist> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() && is.peek() == std::char_traits<char>::eof()) break;
    auto x = detail::parse_numbers(line, 1, line_no);
    if (x[0] > static_cast<std::uint64_t>(kMaxWeight)) {
      throw GraphError("line " + std::to_string(line_no) + ": weight above 2^40");
    }
    values.push_back(static_cast<Dist>(x[0]));
  }
  if (values.size() != n) {
    throw GraphError("weights file has " + std::to_string(values.size()) + " values, expected " +
                     std::to_string(n));
  }
  return VertexWeights(std::move(values));
}

}  // namespace medgraph
