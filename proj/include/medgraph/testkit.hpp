#pragma once

#include <bit>
#include <cstdlib>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "medgraph/graph.hpp"
#include "medgraph/theta.hpp"

namespace medgraph::testkit {

class GuardExceeded : public std::length_error {
 public:
  using std::length_error::length_error;
};

// Oracle size limits. MEDGRAPH_GUARD_SCALE=k multiplies every limit by k.
struct Guards {
  static constexpr VertexId kAllPairs = 4096;     // n^2 matrix of 16-bit entries
  static constexpr VertexId kBruteEcc = 8192;     // n BFS runs, O(n) memory
  static constexpr VertexId kMedianSet = 4096;    // n BFS runs
  static constexpr VertexId kDjokovic = 1024;     // O(m^2) edge pairs
  static constexpr VertexId kFullStructure = 256; // O(n^3) triples and interval closures
  static constexpr VertexId kClosurePoints = 8192;

  static VertexId scaled(VertexId base) {
    if (const char* s = std::getenv("MEDGRAPH_GUARD_SCALE")) {
      long k = std::strtol(s, nullptr, 10);
      if (k > 1) return static_cast<VertexId>(std::min<long long>(1LL << 30, 1LL * base * k));
    }
    return base;
  }
  static void check(VertexId n, VertexId base, const char* what) {
    if (n > scaled(base)) {
      throw GuardExceeded(std::string(what) + ": n=" + std::to_string(n) + " exceeds guard " +
                          std::to_string(scaled(base)));
    }
  }
};

// ---- generators ------------------------------------------------------------

inline Graph path(VertexId n) {
  if (n == 0) throw std::invalid_argument("path: n must be positive");
  std::vector<Edge> edges;
  for (VertexId i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1});
  return Graph::from_edges(n, std::move(edges));
}

// Each vertex i > 0 attaches to a uniform earlier vertex.
inline Graph random_tree(VertexId n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("random_tree: n must be positive");
  std::mt19937_64 rng(seed);
  std::vector<Edge> edges;
  for (VertexId i = 1; i < n; ++i) {
    std::uniform_int_distribution<VertexId> pick(0, i - 1);
    edges.push_back({pick(rng), i});
  }
  return Graph::from_edges(n, std::move(edges));
}

// Product of paths; vertex id is mixed-radix with the last dimension fastest.
inline Graph grid(const std::vector<VertexId>& dims) {
  if (dims.empty()) throw std::invalid_argument("grid: no dimensions");
  std::uint64_t n = 1;
  for (VertexId d : dims) {
    if (d == 0) throw std::invalid_argument("grid: zero dimension");
    n *= d;
    if (n > (1u << 26)) throw GuardExceeded("grid: too many vertices");
  }
  std::vector<Edge> edges;
  std::uint64_t stride = 1;
  for (std::size_t k = dims.size(); k-- > 0;) {
    for (std::uint64_t v = 0; v < n; ++v) {
      if ((v / stride) % dims[k] + 1 < dims[k]) {
        edges.push_back({static_cast<VertexId>(v), static_cast<VertexId>(v + stride)});
      }
    }
    stride *= dims[k];
  }
  return Graph::from_edges(static_cast<VertexId>(n), std::move(edges));
}

inline Graph hypercube(unsigned k) {
  if (k > 24) throw GuardExceeded("hypercube: dimension above 24");
  const VertexId n = VertexId{1} << k;
  std::vector<Edge> edges;
  for (VertexId v = 0; v < n; ++v) {
    for (unsigned b = 0; b < k; ++b) {
      if (!(v >> b & 1)) edges.push_back({v, v | (VertexId{1} << b)});
    }
  }
  return Graph::from_edges(n, std::move(edges));
}

// Vertex (x, y) gets id x * |b| + y.
inline Graph cartesian_product(const Graph& a, const Graph& b) {
  const std::uint64_t na = a.vertex_count(), nb = b.vertex_count();
  if (na * nb > (1u << 26)) throw GuardExceeded("cartesian_product: too many vertices");
  std::vector<Edge> edges;
  for (VertexId x = 0; x < na; ++x) {
    for (const auto& e : b.edges()) {
      edges.push_back({static_cast<VertexId>(x * nb + e.u), static_cast<VertexId>(x * nb + e.v)});
    }
  }
  for (const auto& e : a.edges()) {
    for (VertexId y = 0; y < nb; ++y) {
      edges.push_back({static_cast<VertexId>(e.u * nb + y), static_cast<VertexId>(e.v * nb + y)});
    }
  }
  return Graph::from_edges(static_cast<VertexId>(na * nb), std::move(edges));
}

enum class SeedMode { kUniform, kWalk };

struct ClosureResult {
  Graph graph;
  std::vector<std::uint64_t> points;  // hypercube coordinates, index = vertex id
};

// Random points of Q_k closed under coordinatewise majority. Components of
// the induced subgraph are joined along geodesics and the closure resumes,
// until the set is both median-closed and connected (hence a median graph).
// kWalk draws each seed point as a neighbour of an earlier one. A nonzero
// max_points stops early with GuardExceeded once the set outgrows it.
inline ClosureResult median_closure_points(unsigned k, unsigned seed_points, std::uint64_t seed,
                                           SeedMode mode = SeedMode::kUniform,
                                           VertexId max_points = 0) {
  if (k == 0 || k > 24) throw GuardExceeded("median_closure: k must be in 1..24");
  if (seed_points == 0) throw std::invalid_argument("median_closure: need at least one point");
  VertexId limit = Guards::scaled(Guards::kClosurePoints);
  if (max_points) limit = std::min(limit, max_points);
  std::mt19937_64 rng(seed);
  const std::uint64_t mask = (std::uint64_t{1} << k) - 1;
  std::vector<std::uint8_t> member(std::size_t{1} << k, 0);
  std::vector<std::uint64_t> pts;
  std::size_t closed_upto = 0;  // all triples among pts[0..closed_upto) are closed

  auto add = [&](std::uint64_t x) {
    if (member[x]) return;
    if (pts.size() >= limit) throw GuardExceeded("median_closure: point set above guard");
    member[x] = 1;
    pts.push_back(x);
  };

  for (unsigned i = 0; i < seed_points; ++i) {
    if (mode == SeedMode::kWalk && !pts.empty()) {
      std::uniform_int_distribution<std::size_t> pick(0, pts.size() - 1);
      std::uniform_int_distribution<unsigned> bit(0, k - 1);
      add(pts[pick(rng)] ^ (std::uint64_t{1} << bit(rng)));
    } else {
      add(rng() & mask);
    }
  }

  while (true) {
    // Majority closure: each new point is combined with all earlier pairs.
    while (closed_upto < pts.size()) {
      const std::uint64_t x = pts[closed_upto];
      for (std::size_t i = 0; i < closed_upto; ++i) {
        const std::uint64_t y = pts[i];
        const std::uint64_t both = x & y, either = x ^ y;
        for (std::size_t j = i + 1; j < closed_upto; ++j) add(both | (either & pts[j]));
      }
      ++closed_upto;
    }
    // Connectivity repair.
    std::map<std::uint64_t, VertexId> index;
    for (VertexId i = 0; i < pts.size(); ++i) index[pts[i]] = i;
    std::vector<int> comp(pts.size(), -1);
    std::vector<VertexId> queue{0};
    comp[0] = 0;
    for (std::size_t h = 0; h < queue.size(); ++h) {
      std::uint64_t x = pts[queue[h]];
      for (unsigned b = 0; b < k; ++b) {
        std::uint64_t y = x ^ (std::uint64_t{1} << b);
        if (!member[y]) continue;
        VertexId j = index[y];
        if (comp[j] < 0) {
          comp[j] = 0;
          queue.push_back(j);
        }
      }
    }
    if (queue.size() == pts.size()) break;
    // Join the first outside point to its nearest reached point.
    std::size_t outside = 0;
    while (comp[outside] == 0) ++outside;
    std::uint64_t target = pts[outside], best = pts[0];
    int best_d = 65;
    for (VertexId r : queue) {
      int d = std::popcount(pts[r] ^ target);
      if (d < best_d) {
        best_d = d;
        best = pts[r];
      }
    }
    std::uint64_t cur = best;
    for (unsigned b = 0; b < k; ++b) {
      if ((cur ^ target) >> b & 1) {
        cur ^= std::uint64_t{1} << b;
        add(cur);
      }
    }
  }

  std::map<std::uint64_t, VertexId> index;
  for (VertexId i = 0; i < pts.size(); ++i) index[pts[i]] = i;
  std::vector<Edge> edges;
  for (VertexId i = 0; i < pts.size(); ++i) {
    for (unsigned b = 0; b < k; ++b) {
      std::uint64_t y = pts[i] | (std::uint64_t{1} << b);
      if (y != pts[i] && member[y]) edges.push_back({i, index[y]});
    }
  }
  return {Graph::from_edges(static_cast<VertexId>(pts.size()), std::move(edges)), std::move(pts)};
}

inline Graph median_closure(unsigned k, unsigned seed_points, std::uint64_t seed,
                            SeedMode mode = SeedMode::kUniform, VertexId max_points = 0) {
  return median_closure_points(k, seed_points, seed, mode, max_points).graph;
}

// Spec strings: "path:N", "tree:N[,seed=S]", "grid:AxBx..", "hypercube:K",
// "closure:k=K,p=P[,seed=S][,mode=walk]", "product:<spec>*<spec>".
inline Graph generate(const std::string& spec, std::uint64_t default_seed = 0) {
  auto bad = [&](const std::string& why) {
    return std::invalid_argument("bad generator spec '" + spec + "': " + why);
  };
  auto to_u64 = [&](const std::string& s) {
    std::uint64_t x;
    if (!detail::parse_u64(s, x)) throw bad("expected a number, got '" + s + "'");
    return x;
  };
  auto colon = spec.find(':');
  if (colon == std::string::npos) throw bad("missing ':'");
  std::string kind = spec.substr(0, colon), rest = spec.substr(colon + 1);

  if (kind == "product") {
    auto star = rest.find('*');
    if (star == std::string::npos) throw bad("product needs two specs joined by '*'");
    return cartesian_product(generate(rest.substr(0, star), default_seed),
                             generate(rest.substr(star + 1), default_seed));
  }

  std::map<std::string, std::string> kv;
  std::string positional;
  {
    std::stringstream ss(rest);
    std::string item;
    while (std::getline(ss, item, ',')) {
      auto eq = item.find('=');
      if (eq == std::string::npos) {
        if (!positional.empty()) throw bad("more than one positional value");
        positional = item;
      } else {
        kv[item.substr(0, eq)] = item.substr(eq + 1);
      }
    }
  }
  auto seed = kv.count("seed") ? to_u64(kv["seed"]) : default_seed;
  auto allow = [&](std::set<std::string> keys) {
    for (const auto& [k, v] : kv) {
      if (!keys.count(k)) throw bad("unknown key '" + k + "'");
    }
  };

  if (kind == "path") {
    allow({});
    return path(static_cast<VertexId>(to_u64(positional)));
  }
  if (kind == "tree") {
    allow({"seed"});
    return random_tree(static_cast<VertexId>(to_u64(positional)), seed);
  }
  if (kind == "hypercube") {
    allow({});
    return hypercube(static_cast<unsigned>(to_u64(positional)));
  }
  if (kind == "grid") {
    allow({});
    std::vector<VertexId> dims;
    std::stringstream ss(positional);
    std::string d;
    while (std::getline(ss, d, 'x')) dims.push_back(static_cast<VertexId>(to_u64(d)));
    return grid(dims);
  }
  if (kind == "closure") {
    allow({"k", "p", "seed", "mode"});
    if (!positional.empty() || !kv.count("k") || !kv.count("p")) throw bad("closure needs k= and p=");
    SeedMode mode = SeedMode::kUniform;
    if (kv.count("mode")) {
      if (kv["mode"] == "walk") mode = SeedMode::kWalk;
      else if (kv["mode"] != "uniform") throw bad("mode must be uniform or walk");
    }
    return median_closure(static_cast<unsigned>(to_u64(kv["k"])),
                          static_cast<unsigned>(to_u64(kv["p"])), seed, mode);
  }
  throw bad("unknown kind '" + kind + "'");
}

// ---- oracles ---------------------------------------------------------------

class AllPairsOracle {
 public:
  explicit AllPairsOracle(const Graph& g) : n_(g.vertex_count()) {
    Guards::check(n_, Guards::kAllPairs, "AllPairsOracle");
    d_.assign(std::size_t{n_} * n_, 0);
    for (VertexId s = 0; s < n_; ++s) {
      auto row = bfs_distances(g, s);
      for (VertexId v = 0; v < n_; ++v) {
        if (row[v] < 0) throw GraphError("AllPairsOracle: graph is not connected");
        d_[std::size_t{s} * n_ + v] = static_cast<std::uint16_t>(row[v]);
      }
    }
  }
  VertexId size() const { return n_; }
  Dist operator()(VertexId u, VertexId v) const { return d_[std::size_t{u} * n_ + v]; }
  bool in_interval(VertexId u, VertexId v, VertexId x) const {
    return (*this)(u, x) + (*this)(x, v) == (*this)(u, v);
  }

 private:
  VertexId n_;
  std::vector<std::uint16_t> d_;
};

// Floyd-Warshall, for cross-checking BFS-based rows on small graphs.
inline std::vector<std::vector<Dist>> floyd_warshall(const Graph& g) {
  const VertexId n = g.vertex_count();
  Guards::check(n, 512, "floyd_warshall");
  const Dist inf = std::numeric_limits<Dist>::max() / 4;
  std::vector<std::vector<Dist>> d(n, std::vector<Dist>(n, inf));
  for (VertexId v = 0; v < n; ++v) d[v][v] = 0;
  for (const auto& e : g.edges()) d[e.u][e.v] = d[e.v][e.u] = 1;
  for (VertexId k = 0; k < n; ++k)
    for (VertexId i = 0; i < n; ++i)
      for (VertexId j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
  return d;
}

inline std::vector<Dist> brute_ecc(const Graph& g, std::span<const Dist> w) {
  const VertexId n = g.vertex_count();
  Guards::check(n, Guards::kBruteEcc, "brute_ecc");
  if (w.size() != n) throw std::invalid_argument("brute_ecc: weight vector size mismatch");
  std::vector<Dist> ecc(n);
  for (VertexId u = 0; u < n; ++u) {
    auto row = bfs_distances(g, u);
    Dist best = 0;
    for (VertexId v = 0; v < n; ++v) best = std::max(best, row[v] + w[v]);
    ecc[u] = best;
  }
  return ecc;
}

inline std::vector<VertexId> brute_median_set(const Graph& g) {
  const VertexId n = g.vertex_count();
  Guards::check(n, Guards::kMedianSet, "brute_median_set");
  std::vector<Dist> total(n);
  for (VertexId u = 0; u < n; ++u) {
    auto row = bfs_distances(g, u);
    total[u] = std::accumulate(row.begin(), row.end(), Dist{0});
  }
  Dist best = *std::min_element(total.begin(), total.end());
  std::vector<VertexId> out;
  for (VertexId u = 0; u < n; ++u) {
    if (total[u] == best) out.push_back(u);
  }
  return out;
}

// Classical relation: uv ~ xy iff d(u,x)+d(v,y) != d(u,y)+d(v,x); returns a
// class label per edge, labels numbered by smallest edge id.
inline std::vector<ClassId> djokovic_partition(const Graph& g, const AllPairsOracle& d) {
  Guards::check(g.vertex_count(), Guards::kDjokovic, "djokovic_partition");
  const auto& edges = g.edges();
  const std::size_t m = edges.size();
  detail::DisjointSets sets(m);
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a + 1; b < m; ++b) {
      auto [u, v] = edges[a];
      auto [x, y] = edges[b];
      if (d(u, x) + d(v, y) != d(u, y) + d(v, x)) sets.unite(a, b);
    }
  }
  std::vector<ClassId> label(m);
  std::map<std::size_t, ClassId> ids;
  for (std::size_t e = 0; e < m; ++e) {
    auto r = sets.find(e);
    auto it = ids.try_emplace(r, static_cast<ClassId>(ids.size())).first;
    label[e] = it->second;
  }
  return label;
}

// Interval-closure convexity: every vertex on a shortest path between two
// members is a member. For each member u, marks the union of I(u, v) over
// members v by walking down the distance layers from u.
inline bool is_convex(const Graph& g, const AllPairsOracle& d, std::span<const std::uint8_t> member) {
  const VertexId n = g.vertex_count();
  std::vector<VertexId> order(n);
  std::vector<std::uint8_t> mark(n);
  for (VertexId u = 0; u < n; ++u) {
    if (!member[u]) continue;
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](VertexId a, VertexId b) { return d(u, a) > d(u, b); });
    for (VertexId v = 0; v < n; ++v) mark[v] = member[v];
    for (VertexId x : order) {
      if (!mark[x]) continue;
      if (!member[x]) return false;
      for (const auto& nb : g.neighbors(x)) {
        if (d(u, nb.vertex) + 1 == d(u, x)) mark[nb.vertex] = 1;
      }
    }
  }
  return true;
}

inline bool is_connected_subset(const Graph& g, std::span<const std::uint8_t> member) {
  std::vector<VertexId> queue;
  std::vector<std::uint8_t> seen(g.vertex_count(), 0);
  VertexId total = 0;
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    if (!member[v]) continue;
    ++total;
    if (queue.empty()) {
      queue.push_back(v);
      seen[v] = 1;
    }
  }
  for (std::size_t h = 0; h < queue.size(); ++h) {
    for (const auto& nb : g.neighbors(queue[h])) {
      if (member[nb.vertex] && !seen[nb.vertex]) {
        seen[nb.vertex] = 1;
        queue.push_back(nb.vertex);
      }
    }
  }
  return queue.size() == total;
}

struct MedianCheck {
  bool ok = true;
  std::string witness;
};

// Every triple has exactly one vertex in I(a,b) ∩ I(b,c) ∩ I(a,c). All
// triples up to the full-structure guard, else `samples` random triples.
inline MedianCheck is_median_graph(const Graph& g, const AllPairsOracle& d,
                                   std::size_t samples = 100000, std::uint64_t seed = 0) {
  const VertexId n = g.vertex_count();
  const std::size_t words = (n + 63) / 64;
  auto describe = [](VertexId a, VertexId b, VertexId c, std::size_t count) {
    return "triple (" + std::to_string(a) + "," + std::to_string(b) + "," + std::to_string(c) +
           ") has " + std::to_string(count) + " medians";
  };
  if (n <= Guards::scaled(Guards::kFullStructure)) {
    std::vector<std::uint64_t> interval(std::size_t{n} * n * words, 0);
    auto at = [&](VertexId a, VertexId b) { return interval.data() + (std::size_t{a} * n + b) * words; };
    for (VertexId a = 0; a < n; ++a)
      for (VertexId b = 0; b < n; ++b)
        for (VertexId x = 0; x < n; ++x)
          if (d.in_interval(a, b, x)) at(a, b)[x / 64] |= std::uint64_t{1} << (x % 64);
    for (VertexId a = 0; a < n; ++a)
      for (VertexId b = a; b < n; ++b)
        for (VertexId c = b; c < n; ++c) {
          std::size_t count = 0;
          const auto *p = at(a, b), *q = at(b, c), *r = at(a, c);
          for (std::size_t k = 0; k < words; ++k) count += std::popcount(p[k] & q[k] & r[k]);
          if (count != 1) return {false, describe(a, b, c, count)};
        }
    return {};
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<VertexId> pick(0, n - 1);
  for (std::size_t s = 0; s < samples; ++s) {
    VertexId a = pick(rng), b = pick(rng), c = pick(rng);
    std::size_t count = 0;
    for (VertexId x = 0; x < n; ++x) {
      if (d.in_interval(a, b, x) && d.in_interval(b, c, x) && d.in_interval(a, c, x)) ++count;
    }
    if (count != 1) return {false, describe(a, b, c, count)};
  }
  return {};
}

struct StructureReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

// Per-class structural checks (matching, two components, convex halfspaces
// and boundaries, boundary isomorphism) plus the median triple check.
// Convexity checks run only up to the full-structure guard.
inline StructureReport verify_structure(const Graph& g, const ThetaPartition& t,
                                        std::size_t median_samples = 100000) {
  StructureReport report;
  const VertexId n = g.vertex_count();
  AllPairsOracle d(g);
  const bool full = n <= Guards::scaled(Guards::kFullStructure);
  auto fail = [&](ClassId c, const std::string& what) {
    report.violations.push_back("class " + std::to_string(c) + ": " + what);
  };

  if (t.class_of_edge.size() != g.edge_count()) {
    report.violations.push_back("partition does not cover the edge set");
    return report;
  }
  for (ClassId c = 0; c < t.class_count; ++c) {
    std::vector<VertexId> touched(n, 0);
    bool matching = true;
    for (EdgeId e : t.class_edges(c)) {
      const Edge& ed = g.edge(e);
      if (touched[ed.u]++ || touched[ed.v]++) matching = false;
    }
    if (!matching) fail(c, "not a matching");

    // Components of g minus the class, computed independently of theta.
    std::vector<int> comp(n, -1);
    int comps = 0;
    for (VertexId s = 0; s < n; ++s) {
      if (comp[s] >= 0) continue;
      std::vector<VertexId> queue{s};
      comp[s] = comps;
      for (std::size_t h = 0; h < queue.size(); ++h) {
        for (const auto& nb : g.neighbors(queue[h])) {
          if (t.class_of_edge[nb.edge] == c || comp[nb.vertex] >= 0) continue;
          comp[nb.vertex] = comps;
          queue.push_back(nb.vertex);
        }
      }
      ++comps;
    }
    if (comps != 2) {
      fail(c, "removal leaves " + std::to_string(comps) + " components");
      continue;
    }
    bool sides_ok = true;
    for (EdgeId e : t.class_edges(c)) {
      if (comp[t.side_endpoint(g, e, 0)] != comp[0] || comp[t.side_endpoint(g, e, 1)] == comp[0]) {
        sides_ok = false;
      }
    }
    if (!sides_ok) fail(c, "side labels disagree with components");

    auto bd = boundaries(g, t, c);
    // Boundary isomorphism: the matching maps edges of one boundary onto
    // edges of the other.
    std::map<VertexId, VertexId> across;
    for (std::size_t k = 0; k < bd.side0.size(); ++k) across[bd.side0[k]] = bd.side1[k];
    for (VertexId a : bd.side0) {
      for (const auto& nb : g.neighbors(a)) {
        auto it = across.find(nb.vertex);
        bool in_b0 = it != across.end();
        bool img_adj = in_b0 && g.find_edge(across[a], it->second) != Graph::kNoEdge;
        if (in_b0 != img_adj) fail(c, "boundaries are not isomorphic via the matching");
      }
    }
    if (full) {
      std::vector<std::uint8_t> h0(n), h1(n), b0(n, 0), b1(n, 0);
      for (VertexId v = 0; v < n; ++v) {
        h0[v] = comp[v] == comp[0];
        h1[v] = !h0[v];
      }
      for (VertexId v : bd.side0) b0[v] = 1;
      for (VertexId v : bd.side1) b1[v] = 1;
      if (!is_convex(g, d, h0) || !is_convex(g, d, h1)) fail(c, "halfspace not convex");
      if (!is_convex(g, d, b0) || !is_convex(g, d, b1)) fail(c, "boundary not convex");
    }
  }
  auto median = is_median_graph(g, d, median_samples);
  if (!median.ok) report.violations.push_back("median check: " + median.witness);
  return report;
}

}  // namespace medgraph::testkit
