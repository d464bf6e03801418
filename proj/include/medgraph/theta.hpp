#pragma once

#include <algorithm>
#include <numeric>
#include <queue>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "medgraph/graph.hpp"

namespace medgraph {

// Sorted, duplicate-free list of class ids.
using ClassSet = std::vector<ClassId>;

// Edge partition into Theta-classes. Side 0 of a class is the halfspace
// containing vertex 0.
struct ThetaPartition {
  ClassId class_count = 0;
  std::vector<ClassId> class_of_edge;
  std::vector<std::size_t> class_offsets{0};
  std::vector<EdgeId> class_edge_list;
  std::vector<VertexId> side0_endpoint;  // per edge
  std::vector<std::pair<ClassId, ClassId>> orthogonal_pairs;  // sorted, first < second

  std::span<const EdgeId> class_edges(ClassId c) const {
    return {class_edge_list.data() + class_offsets.at(c),
            class_edge_list.data() + class_offsets.at(c + 1)};
  }
  std::size_t class_size(ClassId c) const { return class_offsets.at(c + 1) - class_offsets.at(c); }

  VertexId side_endpoint(const Graph& g, EdgeId e, int side) const {
    const Edge& ed = g.edge(e);
    VertexId s0 = side0_endpoint[e];
    if (side == 0) return s0;
    return ed.u == s0 ? ed.v : ed.u;
  }

  bool orthogonal(ClassId a, ClassId b) const {
    if (a == b) return false;
    if (a > b) std::swap(a, b);
    return std::binary_search(orthogonal_pairs.begin(), orthogonal_pairs.end(), std::pair{a, b});
  }
};

namespace detail {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) std::swap(a, b);
    parent_[a] = b;
  }

 private:
  std::vector<std::size_t> parent_;
};

struct Square {
  EdgeId xy1, xy2, y1z, y2z;  // x-y1-z-y2
};

// Enumerates every 4-cycle once (Chiba-Nishizeki ordering by degree). A
// vertex pair with three common neighbours is an induced K_{2,3}.
inline std::vector<Square> enumerate_squares(const Graph& g) {
  const VertexId n = g.vertex_count();
  std::vector<VertexId> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](VertexId a, VertexId b) { return g.degree(a) > g.degree(b); });
  std::vector<VertexId> rank(n);
  for (VertexId i = 0; i < n; ++i) rank[order[i]] = i;

  struct Hit {
    VertexId y;
    EdgeId xy, yz;
  };
  std::vector<std::vector<Hit>> bucket(n);
  std::vector<VertexId> touched;
  std::vector<Square> squares;
  for (VertexId x : order) {
    for (const auto& a : g.neighbors(x)) {
      if (rank[a.vertex] <= rank[x]) continue;
      for (const auto& b : g.neighbors(a.vertex)) {
        if (rank[b.vertex] <= rank[x]) continue;
        auto& bk = bucket[b.vertex];
        if (bk.empty()) touched.push_back(b.vertex);
        bk.push_back({a.vertex, a.edge, b.edge});
      }
    }
    for (VertexId z : touched) {
      auto& bk = bucket[z];
      if (bk.size() > 2) {
        throw NotMedianGraph("vertices " + std::to_string(x) + " and " + std::to_string(z) +
                             " span an induced K_{2,3}");
      }
      if (bk.size() == 2) squares.push_back({bk[0].xy, bk[1].xy, bk[0].yz, bk[1].yz});
      bk.clear();
    }
    touched.clear();
  }
  return squares;
}

}  // namespace detail

inline ThetaPartition compute_theta_classes(const Graph& g) {
  const std::size_t m = g.edge_count();
  ThetaPartition t;
  t.class_of_edge.assign(m, 0);
  t.side0_endpoint.assign(m, kNoVertex);
  if (m == 0) return t;

  auto squares = detail::enumerate_squares(g);
  detail::DisjointSets sets(m);
  for (const auto& sq : squares) {
    sets.unite(sq.xy1, sq.y2z);
    sets.unite(sq.xy2, sq.y1z);
  }
  // Class ids in order of smallest member edge id.
  std::vector<ClassId> id_of_root(m, std::numeric_limits<ClassId>::max());
  for (EdgeId e = 0; e < m; ++e) {
    auto r = sets.find(e);
    if (id_of_root[r] == std::numeric_limits<ClassId>::max()) id_of_root[r] = t.class_count++;
    t.class_of_edge[e] = id_of_root[r];
  }

  t.class_offsets.assign(std::size_t{t.class_count} + 1, 0);
  for (EdgeId e = 0; e < m; ++e) ++t.class_offsets[t.class_of_edge[e] + 1];
  std::partial_sum(t.class_offsets.begin(), t.class_offsets.end(), t.class_offsets.begin());
  t.class_edge_list.resize(m);
  {
    std::vector<std::size_t> fill(t.class_offsets.begin(), t.class_offsets.end() - 1);
    for (EdgeId e = 0; e < m; ++e) t.class_edge_list[fill[t.class_of_edge[e]]++] = e;
  }

  // Matching property: no vertex sees the same class twice.
  std::vector<VertexId> seen_at(t.class_count, kNoVertex);
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    for (const auto& nb : g.neighbors(v)) {
      ClassId c = t.class_of_edge[nb.edge];
      if (seen_at[c] == v) {
        throw NotMedianGraph("class " + std::to_string(c) + " is not a matching at vertex " +
                             std::to_string(v));
      }
      seen_at[c] = v;
    }
  }

  // The endpoint closer to vertex 0 lies in the halfspace containing it.
  auto dist = bfs_distances(g, 0);
  for (EdgeId e = 0; e < m; ++e) {
    const Edge& ed = g.edge(e);
    t.side0_endpoint[e] = dist[ed.u] < dist[ed.v] ? ed.u : ed.v;
  }

  for (const auto& sq : squares) {
    ClassId a = t.class_of_edge[sq.xy1], b = t.class_of_edge[sq.xy2];
    if (a > b) std::swap(a, b);
    t.orthogonal_pairs.emplace_back(a, b);
  }
  std::sort(t.orthogonal_pairs.begin(), t.orthogonal_pairs.end());
  t.orthogonal_pairs.erase(std::unique(t.orthogonal_pairs.begin(), t.orthogonal_pairs.end()),
                           t.orthogonal_pairs.end());
  return t;
}

// Membership of every vertex in side 1 of class c (1) or side 0 (0). Runs
// two searches that avoid class-c edges and checks they split V in two.
inline std::vector<std::uint8_t> halfspace_mask(const Graph& g, const ThetaPartition& t,
                                                ClassId c) {
  if (c >= t.class_count) throw std::out_of_range("class id out of range");
  const VertexId n = g.vertex_count();
  std::vector<std::uint8_t> side(n, 2);
  std::vector<VertexId> queue;
  queue.reserve(n);
  for (int s = 0; s < 2; ++s) {
    std::size_t head = queue.size();
    for (EdgeId e : t.class_edges(c)) {
      VertexId x = t.side_endpoint(g, e, s);
      if (side[x] == 2) {
        side[x] = static_cast<std::uint8_t>(s);
        queue.push_back(x);
      } else if (side[x] != s) {
        throw NotMedianGraph("class " + std::to_string(c) + " does not separate its endpoints");
      }
    }
    for (; head < queue.size(); ++head) {
      VertexId v = queue[head];
      for (const auto& nb : g.neighbors(v)) {
        if (t.class_of_edge[nb.edge] == c) continue;
        if (side[nb.vertex] == 2) {
          side[nb.vertex] = static_cast<std::uint8_t>(s);
          queue.push_back(nb.vertex);
        } else if (side[nb.vertex] != s) {
          throw NotMedianGraph("removing class " + std::to_string(c) +
                               " leaves one connected component");
        }
      }
    }
  }
  if (queue.size() != n) {
    throw NotMedianGraph("removing class " + std::to_string(c) + " leaves more than two components");
  }
  return side;
}

inline std::vector<VertexId> halfspace_members(const Graph& g, const ThetaPartition& t, ClassId c,
                                               int side) {
  auto mask = halfspace_mask(g, t, c);
  std::vector<VertexId> out;
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    if (mask[v] == side) out.push_back(v);
  }
  return out;
}

struct HalfspaceSize {
  VertexId side0 = 0;
  VertexId side1 = 0;
  VertexId min_side() const { return std::min(side0, side1); }
  friend bool operator==(const HalfspaceSize&, const HalfspaceSize&) = default;
};

// Halfspace sizes of every class by peripheral peeling around vertex 0: the
// class whose far halfspace is farthest from vertex 0 is peripheral, so its
// far side equals its alive far endpoints. Those are removed and their unit
// weights pushed across the matching.
inline std::vector<HalfspaceSize> halfspace_sizes_all(const Graph& g, const ThetaPartition& t) {
  const VertexId n = g.vertex_count();
  const ClassId q = t.class_count;
  std::vector<HalfspaceSize> sizes(q);
  if (q == 0) return sizes;
  auto dist = bfs_distances(g, 0);

  // Per class, edges ordered by distance of the far endpoint; `cursor` skips
  // edges whose far endpoint is already removed.
  std::vector<EdgeId> by_far(t.class_edge_list);
  for (ClassId c = 0; c < q; ++c) {
    std::sort(by_far.begin() + t.class_offsets[c], by_far.begin() + t.class_offsets[c + 1],
              [&](EdgeId a, EdgeId b) {
                return dist[t.side_endpoint(g, a, 1)] < dist[t.side_endpoint(g, b, 1)];
              });
  }
  std::vector<std::size_t> cursor(t.class_offsets.begin(), t.class_offsets.end() - 1);
  std::vector<std::uint8_t> alive(n, 1), peeled(q, 0);
  std::vector<VertexId> weight(n, 1);

  auto current_key = [&](ClassId c) -> Dist {
    auto& k = cursor[c];
    while (k < t.class_offsets[c + 1] && !alive[t.side_endpoint(g, by_far[k], 1)]) ++k;
    return k < t.class_offsets[c + 1] ? dist[t.side_endpoint(g, by_far[k], 1)] : kUnreached;
  };

  std::priority_queue<std::pair<Dist, ClassId>> heap;
  for (ClassId c = 0; c < q; ++c) heap.emplace(current_key(c), c);

  while (!heap.empty()) {
    auto [key, c] = heap.top();
    heap.pop();
    if (peeled[c]) continue;
    Dist now = current_key(c);
    if (now == kUnreached) {
      throw NotMedianGraph("class " + std::to_string(c) + " lost its halfspace while peeling");
    }
    if (now != key) continue;  // a fresher entry is in the heap
    peeled[c] = 1;
    VertexId far_total = 0;
    for (EdgeId e : t.class_edges(c)) {
      VertexId far = t.side_endpoint(g, e, 1), near = t.side_endpoint(g, e, 0);
      if (!alive[far]) continue;
      if (!alive[near]) throw NotMedianGraph("no peripheral class in residual graph");
      far_total += weight[far];
      weight[near] += weight[far];
      alive[far] = 0;
      for (const auto& nb : g.neighbors(far)) {
        ClassId j = t.class_of_edge[nb.edge];
        if (peeled[j] || t.side0_endpoint[nb.edge] == far) continue;
        Dist k = current_key(j);
        if (k == kUnreached) {
          throw NotMedianGraph("no peripheral class in residual graph");
        }
        heap.emplace(k, j);
      }
    }
    sizes[c] = {n - far_total, far_total};
  }
  if (weight[0] != n || std::count(alive.begin(), alive.end(), 1) != 1) {
    throw NotMedianGraph("peeling did not collapse onto vertex 0");
  }
  return sizes;
}

struct Boundaries {
  std::vector<VertexId> side0;  // side0[k] is matched with side1[k]
  std::vector<VertexId> side1;
};

inline Boundaries boundaries(const Graph& g, const ThetaPartition& t, ClassId c) {
  if (c >= t.class_count) throw std::out_of_range("class id out of range");
  Boundaries b;
  for (EdgeId e : t.class_edges(c)) {
    b.side0.push_back(t.side_endpoint(g, e, 0));
    b.side1.push_back(t.side_endpoint(g, e, 1));
  }
  return b;
}

// Sinks of the orientation of every edge toward its strict-majority side.
inline std::vector<VertexId> median_set(const Graph& g, const ThetaPartition& t,
                                        std::span<const HalfspaceSize> sizes) {
  std::vector<std::uint8_t> sink(g.vertex_count(), 1);
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const auto& s = sizes[t.class_of_edge[e]];
    if (s.side0 > s.side1) {
      sink[t.side_endpoint(g, e, 1)] = 0;
    } else if (s.side1 > s.side0) {
      sink[t.side_endpoint(g, e, 0)] = 0;
    }
  }
  std::vector<VertexId> out;
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    if (sink[v]) out.push_back(v);
  }
  return out;
}

// Ladder sets L(basepoint, v) and distances from the basepoint.
class LadderTable {
 public:
  VertexId basepoint() const { return basepoint_; }
  Dist distance(VertexId v) const { return dist_[v]; }
  const std::vector<Dist>& distances() const { return dist_; }
  std::span<const ClassId> ladder(VertexId v) const {
    return {flat_.data() + begin_[v], flat_.data() + begin_[v] + size_[v]};
  }

 private:
  friend LadderTable ladder_table(const Graph&, const ThetaPartition&, VertexId);
  VertexId basepoint_ = 0;
  std::vector<Dist> dist_;
  std::vector<std::size_t> begin_;
  std::vector<std::uint8_t> size_;
  std::vector<ClassId> flat_;
};

// BFS from v0; a vertex inherits its parent's ladder, extended by the class
// of the discovering edge when that class touches v0.
inline LadderTable ladder_table(const Graph& g, const ThetaPartition& t, VertexId v0) {
  check_vertex(g, v0);
  const VertexId n = g.vertex_count();
  LadderTable lt;
  lt.basepoint_ = v0;
  lt.dist_.assign(n, kUnreached);
  lt.begin_.assign(n, 0);
  lt.size_.assign(n, 0);
  std::vector<std::uint8_t> at_v0(t.class_count, 0);
  for (const auto& nb : g.neighbors(v0)) at_v0[t.class_of_edge[nb.edge]] = 1;

  std::vector<VertexId> queue{v0};
  queue.reserve(n);
  lt.dist_[v0] = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    VertexId v = queue[head];
    for (const auto& nb : g.neighbors(v)) {
      VertexId w = nb.vertex;
      if (lt.dist_[w] != kUnreached) continue;
      lt.dist_[w] = lt.dist_[v] + 1;
      queue.push_back(w);
      ClassId c = t.class_of_edge[nb.edge];
      auto parent = lt.ladder(v);
      if (!at_v0[c]) {
        lt.begin_[w] = lt.begin_[v];
        lt.size_[w] = lt.size_[v];
        continue;
      }
      lt.begin_[w] = lt.flat_.size();
      auto pos = std::lower_bound(parent.begin(), parent.end(), c) - parent.begin();
      std::vector<ClassId> merged(parent.begin(), parent.end());
      merged.insert(merged.begin() + pos, c);
      if (pos < static_cast<std::ptrdiff_t>(parent.size()) && parent[pos] == c) {
        throw NotMedianGraph("class crossed twice on a shortest path");
      }
      lt.flat_.insert(lt.flat_.end(), merged.begin(), merged.end());
      lt.size_[w] = static_cast<std::uint8_t>(merged.size());
    }
  }
  return lt;
}

inline bool is_pof(const ThetaPartition& t, std::span<const ClassId> x) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] >= t.class_count) throw std::out_of_range("class id out of range");
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      if (!t.orthogonal(x[i], x[j])) return false;
    }
  }
  return true;
}

}  // namespace medgraph
