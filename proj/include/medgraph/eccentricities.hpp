#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include "medgraph/graph.hpp"
#include "medgraph/theta.hpp"

namespace medgraph {

// Class with smaller side >= n / (2 ln n), compared as min*2*ln(n) >= n.
inline bool is_log_balanced(VertexId min_side, VertexId n) {
  return static_cast<double>(min_side) * 2.0 * std::log(static_cast<double>(n)) >=
         static_cast<double>(n);
}

struct BalanceVerdict {
  std::optional<ClassId> balanced_class;
  double threshold = 0;  // n / (2 ln n)
  bool all_unbalanced() const { return !balanced_class.has_value(); }
};

// The balanced class with the largest smaller side; ties go to the smaller id.
inline BalanceVerdict find_balanced_class(const Graph& g, const ThetaPartition& t,
                                          std::span<const HalfspaceSize> sizes) {
  const VertexId n = g.vertex_count();
  if (n < 3) throw std::invalid_argument("find_balanced_class: needs n >= 3");
  BalanceVerdict verdict;
  verdict.threshold = n / (2.0 * std::log(static_cast<double>(n)));
  VertexId best = 0;
  for (ClassId c = 0; c < t.class_count; ++c) {
    VertexId s = sizes[c].min_side();
    if (is_log_balanced(s, n) && (!verdict.balanced_class || s > best)) {
      verdict.balanced_class = c;
      best = s;
    }
  }
  return verdict;
}

// Combines eccentricities computed inside each halfspace of a split. `side`
// gives the halfspace of every vertex (0 or 1); `own_side_ecc[v]` is the
// eccentricity of v inside its own halfspace.
inline std::vector<Dist> merge_balanced(const Graph& g, std::span<const std::uint8_t> side,
                                        std::span<const Dist> own_side_ecc) {
  const VertexId n = g.vertex_count();
  std::vector<VertexId> members[2];
  for (VertexId v = 0; v < n; ++v) members[side[v]].push_back(v);
  if (members[0].empty() || members[1].empty()) {
    throw std::invalid_argument("merge_balanced: one side is empty");
  }
  std::vector<Dist> ecc(own_side_ecc.begin(), own_side_ecc.end());
  for (int s = 0; s < 2; ++s) {
    auto gates = gated_bfs(g, members[s]);
    for (VertexId v : members[1 - s]) {
      ecc[v] = std::max(ecc[v], gates.dist[v] + own_side_ecc[gates.gate[v]]);
    }
  }
  return ecc;
}

inline std::vector<Dist> ecc_from_center(const Graph& g, std::span<const Dist> w, VertexId v0) {
  auto dist = bfs_distances(g, v0);
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    if (dist[v] + w[v] > w[v0] && v != v0) {
      throw std::logic_error("ecc_from_center: v0 is not its own farthest vertex");
    }
  }
  std::vector<Dist> ecc(g.vertex_count());
  for (VertexId v = 0; v < g.vertex_count(); ++v) ecc[v] = v == v0 ? w[v0] : dist[v] + w[v0];
  return ecc;
}

struct CenterShortcut {
  VertexId v0;
};

struct SliceDecomposition {
  VertexId v0 = 0;
  VertexId u_max = 0;
  ClassSet wide_ladder;                  // ascending class ids
  std::vector<std::uint32_t> slice_of;   // 0..l-1, or l for the final large set
  std::vector<std::vector<VertexId>> slices;
  std::vector<Dist> dist_from_v0;

  std::uint32_t slice_count() const { return static_cast<std::uint32_t>(slices.size()); }
  bool in_large_set(VertexId v, std::uint32_t i) const { return slice_of[v] >= i; }
};

using UnbalancedPlan = std::variant<CenterShortcut, SliceDecomposition>;

// Median, farthest weighted vertex from it, and the slices cut along the
// ladder toward that vertex. Requires every class to be unbalanced.
inline UnbalancedPlan unbalanced_setup(const Graph& g, const ThetaPartition& t,
                                       std::span<const HalfspaceSize> sizes,
                                       std::span<const Dist> w) {
  const VertexId n = g.vertex_count();
  auto med = median_set(g, t, sizes);
  if (med.size() != 1) {
    throw std::logic_error("unbalanced_setup: median is not unique, instance is not all-unbalanced");
  }
  const VertexId v0 = med.front();
  auto lt = ladder_table(g, t, v0);
  VertexId u_max = v0;
  Dist best = w[v0];
  for (VertexId v = 0; v < n; ++v) {
    if (lt.distance(v) + w[v] > best) {
      best = lt.distance(v) + w[v];
      u_max = v;
    }
  }
  if (u_max == v0) return CenterShortcut{v0};

  SliceDecomposition dec;
  dec.v0 = v0;
  dec.u_max = u_max;
  auto wide = lt.ladder(u_max);
  dec.wide_ladder.assign(wide.begin(), wide.end());
  const auto count = static_cast<std::uint32_t>(wide.size());
  std::vector<std::uint32_t> position(t.class_count, count);
  for (std::uint32_t i = 0; i < count; ++i) position[wide[i]] = i;
  dec.slice_of.assign(n, count);
  dec.slices.resize(count);
  for (VertexId v = 0; v < n; ++v) {
    for (ClassId c : lt.ladder(v)) dec.slice_of[v] = std::min(dec.slice_of[v], position[c]);
    if (dec.slice_of[v] < count) dec.slices[dec.slice_of[v]].push_back(v);
  }
  for (const auto& s : dec.slices) {
    if (s.empty()) throw std::logic_error("unbalanced_setup: empty slice");
    if (is_log_balanced(static_cast<VertexId>(s.size()), n)) {
      throw std::logic_error("unbalanced_setup: slice larger than n / (2 ln n)");
    }
  }
  dec.dist_from_v0 = lt.distances();
  return dec;
}

// Lifted weights on slice i: a boundary vertex x takes the largest
// d(x,z) + w(z) over its open fiber in G_{i+1}; other slice vertices keep w.
// The result is indexed by vertex of g; entries outside slice i copy w.
inline std::vector<Dist> star_weights(const Graph& g, const SliceDecomposition& dec,
                                      std::uint32_t i, std::span<const Dist> w) {
  const VertexId n = g.vertex_count();
  std::vector<std::uint8_t> allowed(n);
  for (VertexId v = 0; v < n; ++v) allowed[v] = dec.in_large_set(v, i);
  auto gates = gated_bfs(g, dec.slices.at(i), allowed);
  std::vector<Dist> lifted(w.begin(), w.end());
  std::vector<std::uint8_t> has_fiber(n, 0);
  for (VertexId z = 0; z < n; ++z) {
    if (!dec.in_large_set(z, i + 1)) continue;
    VertexId x = gates.gate[z];
    if (x == kNoVertex) throw std::logic_error("star_weights: large set not reached from slice");
    Dist candidate = gates.dist[z] + w[z];
    lifted[x] = has_fiber[x] ? std::max(lifted[x], candidate) : candidate;
    has_fiber[x] = 1;
  }
  for (VertexId x : dec.slices[i]) {
    bool boundary = false;
    for (const auto& nb : g.neighbors(x)) boundary |= dec.in_large_set(nb.vertex, i + 1);
    if (boundary != static_cast<bool>(has_fiber[x])) {
      throw std::logic_error("star_weights: boundary vertex without open fiber");
    }
  }
  return lifted;
}

// Assembles eccentricities from per-slice results. ecc_w[x] and ecc_lifted[x]
// hold, for x in slice i, its eccentricity inside the slice under w and under
// the lifted weights of that slice.
inline std::vector<Dist> peel_slices(const Graph& g, const SliceDecomposition& dec,
                                     std::span<const Dist> ecc_w, std::span<const Dist> ecc_lifted,
                                     std::span<const Dist> w) {
  const VertexId n = g.vertex_count();
  const std::uint32_t count = dec.slice_count();
  std::vector<Dist> label(n, 0);
  std::vector<std::uint8_t> allowed(n);
  for (std::uint32_t i = count; i-- > 0;) {
    for (VertexId x : dec.slices[i]) label[x] = std::max(ecc_w[x], ecc_lifted[x]);
    if (i + 1 == count) continue;
    for (VertexId v = 0; v < n; ++v) allowed[v] = dec.in_large_set(v, i);
    auto gates = gated_bfs(g, dec.slices[i], allowed);
    for (VertexId x = 0; x < n; ++x) {
      if (dec.slice_of[x] > i && dec.slice_of[x] < count) {
        label[x] = std::max(label[x], gates.dist[x] + ecc_w[gates.gate[x]]);
      }
    }
  }
  const Dist reach = dec.dist_from_v0[dec.u_max] + w[dec.u_max];
  for (VertexId z = 0; z < n; ++z) {
    if (dec.slice_of[z] == count) label[z] = dec.dist_from_v0[z] + reach;
  }
  return label;
}

struct MorseOptions {
  // Throw std::logic_error when a recursion-size or depth bound fails.
  bool strict_accounting = true;
};

struct MorseStats {
  std::size_t calls = 0;
  std::size_t base_cases = 0;
  std::size_t balanced_splits = 0;
  std::size_t unbalanced_splits = 0;
  std::size_t center_shortcuts = 0;
  std::size_t max_depth = 0;  // the top-level call has depth 1
  std::size_t max_slices = 0;
  std::size_t accounting_violations = 0;
  double depth_bound = 0;  // 2 (ln n)^2 + 2 for the top-level n
};

inline double morse_depth_bound(VertexId n) {
  double l = std::log(static_cast<double>(std::max<VertexId>(n, 1)));
  return 2.0 * l * l + 2.0;
}

namespace detail {

struct MorseRun {
  MorseStats& stats;
  const MorseOptions& options;

  void violation(const std::string& what) {
    ++stats.accounting_violations;
    if (options.strict_accounting) throw std::logic_error("morse: " + what);
  }

  void check_callees(VertexId n, std::span<const VertexId> callee_sizes) {
    const double cap = n * (1.0 - 1.0 / (2.0 * std::log(static_cast<double>(n))));
    std::size_t total = 0;
    for (VertexId s : callee_sizes) {
      total += s;
      if (s > cap * (1 + 1e-12)) violation("callee of size " + std::to_string(s) + " exceeds cap");
    }
    if (total > n) violation("callees total " + std::to_string(total) + " > " + std::to_string(n));
  }

  std::vector<Dist> solve_on(const Graph& g, std::span<const VertexId> members,
                             std::span<const Dist> w, std::size_t depth) {
    auto sub = induced_subgraph(g, members);
    std::vector<Dist> sub_w(sub.to_parent.size());
    for (VertexId i = 0; i < sub_w.size(); ++i) sub_w[i] = w[sub.to_parent[i]];
    auto sub_ecc = solve(sub.graph, sub_w, depth);
    std::vector<Dist> out(g.vertex_count(), 0);
    for (VertexId i = 0; i < sub_ecc.size(); ++i) out[sub.to_parent[i]] = sub_ecc[i];
    return out;
  }

  std::vector<Dist> solve(const Graph& g, std::span<const Dist> w, std::size_t depth) {
    ++stats.calls;
    stats.max_depth = std::max(stats.max_depth, depth);
    if (static_cast<double>(depth) > stats.depth_bound) {
      violation("recursion depth " + std::to_string(depth) + " exceeds bound");
    }
    const VertexId n = g.vertex_count();
    if (n == 1) {
      ++stats.base_cases;
      return {w[0]};
    }
    if (n == 2) {
      ++stats.base_cases;
      return {std::max(w[0], 1 + w[1]), std::max(w[1], 1 + w[0])};
    }
    auto t = compute_theta_classes(g);
    auto sizes = halfspace_sizes_all(g, t);
    auto verdict = find_balanced_class(g, t, sizes);

    if (verdict.balanced_class) {
      ++stats.balanced_splits;
      auto side = halfspace_mask(g, t, *verdict.balanced_class);
      std::vector<VertexId> members[2];
      for (VertexId v = 0; v < n; ++v) members[side[v]].push_back(v);
      VertexId callee_sizes[2] = {static_cast<VertexId>(members[0].size()),
                                  static_cast<VertexId>(members[1].size())};
      check_callees(n, callee_sizes);
      std::vector<Dist> own(n);
      for (int s = 0; s < 2; ++s) {
        auto part = solve_on(g, members[s], w, depth + 1);
        for (VertexId v : members[s]) own[v] = part[v];
      }
      return merge_balanced(g, side, own);
    }

    auto plan = unbalanced_setup(g, t, sizes, w);
    if (auto* center = std::get_if<CenterShortcut>(&plan)) {
      ++stats.center_shortcuts;
      return ecc_from_center(g, w, center->v0);
    }
    auto& dec = std::get<SliceDecomposition>(plan);
    ++stats.unbalanced_splits;
    stats.max_slices = std::max<std::size_t>(stats.max_slices, dec.slice_count());
    std::vector<VertexId> callee_sizes;
    for (const auto& s : dec.slices) {
      callee_sizes.push_back(static_cast<VertexId>(s.size()));
      callee_sizes.push_back(static_cast<VertexId>(s.size()));
    }
    check_callees(n, callee_sizes);

    std::vector<Dist> ecc_w(n, 0), ecc_lifted(n, 0);
    for (std::uint32_t i = 0; i < dec.slice_count(); ++i) {
      auto lifted = star_weights(g, dec, i, w);
      for (VertexId x : dec.slices[i]) {
        if (lifted[x] >= (Dist{1} << 62)) throw std::overflow_error("morse: lifted weight overflow");
      }
      auto plain = solve_on(g, dec.slices[i], w, depth + 1);
      auto raised = solve_on(g, dec.slices[i], lifted, depth + 1);
      for (VertexId x : dec.slices[i]) {
        ecc_w[x] = plain[x];
        ecc_lifted[x] = raised[x];
      }
    }
    return peel_slices(g, dec, ecc_w, ecc_lifted, w);
  }
};

}  // namespace detail

// All weighted eccentricities max_v d(u,v) + w(v) of a median graph.
inline std::vector<Dist> morse(const Graph& g, const VertexWeights& w, MorseStats* stats = nullptr,
                               const MorseOptions& options = {}) {
  if (w.size() != g.vertex_count()) throw std::invalid_argument("morse: weight vector size mismatch");
  if (g.vertex_count() == 0) return {};
  MorseStats local;
  MorseStats& s = stats ? *stats : local;
  s = MorseStats{};
  s.depth_bound = morse_depth_bound(g.vertex_count());
  detail::MorseRun run{s, options};
  return run.solve(g, w.values(), 1);
}

inline std::vector<Dist> morse(const Graph& g, MorseStats* stats = nullptr) {
  return morse(g, VertexWeights::zeros(g.vertex_count()), stats);
}

}  // namespace medgraph
