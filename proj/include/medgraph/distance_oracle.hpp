#pragma once

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "medgraph/graph.hpp"
#include "medgraph/theta.hpp"

namespace medgraph {

class CorruptLabelTable : public std::runtime_error {
 public:
  explicit CorruptLabelTable(const std::string& what)
      : std::runtime_error("corrupted label table: " + what) {}
};

using SubproblemId = std::uint32_t;
inline constexpr SubproblemId kNoSubproblem = std::numeric_limits<SubproblemId>::max();

struct BalancedRecord {
  SubproblemId sub;
  ClassId cls;
  std::uint8_t side;
  VertexId gate;  // nearest vertex on the other side
  Dist dist;
  friend bool operator==(const BalancedRecord&, const BalancedRecord&) = default;
};

struct FiberTriplet {
  ClassId removed;
  VertexId gate;
  Dist dist;
  friend bool operator==(const FiberTriplet&, const FiberTriplet&) = default;
};

struct UnbalancedRecord {
  SubproblemId sub;
  VertexId center;
  Dist dist;  // to the center
  ClassSet ladder;
  std::vector<FiberTriplet> triplets;  // sorted by removed class
  friend bool operator==(const UnbalancedRecord&, const UnbalancedRecord&) = default;
};

struct CenterRecord {
  SubproblemId sub;
  friend bool operator==(const CenterRecord&, const CenterRecord&) = default;
};

struct LeafRecord {
  SubproblemId sub;
  VertexId partner;  // kNoVertex for a single-vertex subproblem
  friend bool operator==(const LeafRecord&, const LeafRecord&) = default;
};

using LevelRecord = std::variant<BalancedRecord, UnbalancedRecord, CenterRecord, LeafRecord>;

inline SubproblemId subproblem_of(const LevelRecord& r) {
  return std::visit([](const auto& x) { return x.sub; }, r);
}

enum class SubproblemKind { kLeaf, kBalanced, kUnbalanced };

struct Subproblem {
  SubproblemId parent;
  SubproblemKind kind;
  VertexId size;
  std::uint32_t depth;  // root has depth 0
};

struct LabelTable {
  VertexId n = 0;
  std::vector<std::vector<LevelRecord>> labels;  // by global vertex id
  std::vector<Subproblem> subproblems;

  const std::vector<LevelRecord>& records(VertexId v) const {
    if (v >= n) throw std::out_of_range("vertex id " + std::to_string(v) + " out of range");
    return labels[v];
  }
  std::size_t max_depth() const {
    std::size_t d = 0;
    for (const auto& l : labels) d = std::max(d, l.size());
    return d;
  }
};

inline std::size_t oracle_depth_bound(VertexId n) {
  if (n <= 1) return 1;
  return static_cast<std::size_t>(std::ceil(std::log(n) / std::log(1.5))) + 1;
}

namespace detail {

// Induced subgraph using caller scratch (all kNoVertex on entry and exit),
// so repeated small extractions stay proportional to their size.
inline Graph induced_with_scratch(const Graph& g, std::span<const VertexId> sorted_subset,
                                  std::vector<VertexId>& scratch) {
  for (VertexId i = 0; i < sorted_subset.size(); ++i) scratch[sorted_subset[i]] = i;
  std::vector<Edge> edges;
  for (VertexId i = 0; i < sorted_subset.size(); ++i) {
    for (const auto& nb : g.neighbors(sorted_subset[i])) {
      VertexId j = scratch[nb.vertex];
      if (j != kNoVertex && i < j) edges.push_back({i, j});
    }
  }
  for (VertexId v : sorted_subset) scratch[v] = kNoVertex;
  return Graph::from_edges(static_cast<VertexId>(sorted_subset.size()), std::move(edges),
                           Validation::kOff);
}

class OracleBuilder {
 public:
  explicit OracleBuilder(LabelTable& table) : table_(table) {}

  void build(const Graph& g, std::vector<VertexId> global, SubproblemId parent,
             std::uint32_t depth) {
    const VertexId n = g.vertex_count();
    const auto sub = static_cast<SubproblemId>(table_.subproblems.size());
    table_.subproblems.push_back({parent, SubproblemKind::kLeaf, n, depth});
    if (parent != kNoSubproblem && 3ull * n > 2ull * table_.subproblems[parent].size) {
      throw std::logic_error("build_oracle: subproblem does not shrink below 2/3");
    }
    if (n <= 2) {
      for (VertexId v = 0; v < n; ++v) {
        table_.labels[global[v]].push_back(LeafRecord{sub, n == 2 ? global[1 - v] : kNoVertex});
      }
      return;
    }
    auto t = compute_theta_classes(g);
    auto sizes = halfspace_sizes_all(g, t);
    std::optional<ClassId> chosen;
    for (ClassId c = 0; c < t.class_count; ++c) {
      VertexId s = sizes[c].min_side();
      if (3ull * s >= n && (!chosen || s > sizes[*chosen].min_side())) chosen = c;
    }
    if (chosen) {
      table_.subproblems[sub].kind = SubproblemKind::kBalanced;
      build_balanced(g, global, t, *chosen, sub, depth);
    } else {
      table_.subproblems[sub].kind = SubproblemKind::kUnbalanced;
      build_unbalanced(g, global, t, sizes, sub, depth);
    }
  }

 private:
  void recurse(const Graph& g, const std::vector<VertexId>& global,
               std::vector<VertexId> members, SubproblemId sub, std::uint32_t depth) {
    std::sort(members.begin(), members.end());
    if (scratch_.size() < g.vertex_count()) scratch_.resize(g.vertex_count(), kNoVertex);
    Graph child = induced_with_scratch(g, members, scratch_);
    std::vector<VertexId> child_global(members.size());
    for (VertexId i = 0; i < members.size(); ++i) child_global[i] = global[members[i]];
    build(child, std::move(child_global), sub, depth + 1);
  }

  void build_balanced(const Graph& g, const std::vector<VertexId>& global, const ThetaPartition& t,
                      ClassId c, SubproblemId sub, std::uint32_t depth) {
    const VertexId n = g.vertex_count();
    auto side = halfspace_mask(g, t, c);
    std::vector<VertexId> members[2];
    for (VertexId v = 0; v < n; ++v) members[side[v]].push_back(v);
    std::vector<VertexId> gate(n);
    std::vector<Dist> dist(n);
    for (int s = 0; s < 2; ++s) {
      auto ga = gated_bfs(g, members[s]);
      for (VertexId v : members[1 - s]) {
        gate[v] = ga.gate[v];
        dist[v] = ga.dist[v];
      }
    }
    for (VertexId v = 0; v < n; ++v) {
      table_.labels[global[v]].push_back(BalancedRecord{sub, c, side[v], global[gate[v]], dist[v]});
    }
    for (int s = 0; s < 2; ++s) recurse(g, global, std::move(members[s]), sub, depth);
  }

  void build_unbalanced(const Graph& g, const std::vector<VertexId>& global,
                        const ThetaPartition& t, std::span<const HalfspaceSize> sizes,
                        SubproblemId sub, std::uint32_t depth) {
    const VertexId n = g.vertex_count();
    auto med = median_set(g, t, sizes);
    if (med.size() != 1) throw std::logic_error("build_oracle: unbalanced instance without unique median");
    const VertexId v0 = med.front();
    auto lt = ladder_table(g, t, v0);

    // Fibers keyed by ladder set.
    std::map<ClassSet, std::uint32_t> fiber_index;
    std::vector<ClassSet> fiber_ladder;
    std::vector<std::vector<VertexId>> fibers;
    std::vector<std::uint32_t> fiber_of(n, std::numeric_limits<std::uint32_t>::max());
    for (VertexId v = 0; v < n; ++v) {
      if (v == v0) continue;
      auto lad = lt.ladder(v);
      ClassSet key(lad.begin(), lad.end());
      auto [it, inserted] = fiber_index.try_emplace(key, static_cast<std::uint32_t>(fibers.size()));
      if (inserted) {
        fibers.emplace_back();
        fiber_ladder.push_back(key);
      }
      fiber_of[v] = it->second;
      fibers[it->second].push_back(v);
    }

    table_.labels[global[v0]].push_back(CenterRecord{sub});
    std::vector<std::uint8_t> allowed(n, 0);
    for (std::uint32_t f = 0; f < fibers.size(); ++f) {
      const auto& lad = fiber_ladder[f];
      std::vector<std::vector<FiberTriplet>> triplets(fibers[f].size());
      if (lad.size() >= 2) {
        for (ClassId c : lad) {
          // Vertices of V_{L \ {c}} adjacent to the fiber through class c.
          std::vector<VertexId> seeds;
          for (VertexId u : fibers[f]) {
            for (const auto& nb : g.neighbors(u)) {
              if (t.class_of_edge[nb.edge] == c && fiber_of[nb.vertex] != f && nb.vertex != v0) {
                seeds.push_back(nb.vertex);
              }
            }
          }
          if (seeds.empty()) throw std::logic_error("build_oracle: fiber has no neighbouring fiber");
          for (VertexId s : seeds) {
            if (lt.ladder(s).size() + 1 != lad.size()) {
              throw std::logic_error("build_oracle: gate ladder is not one class smaller");
            }
            allowed[s] = 1;
          }
          for (VertexId u : fibers[f]) allowed[u] = 1;
          auto ga = local_gated_bfs(g, seeds, allowed, fibers[f]);
          for (VertexId s : seeds) allowed[s] = 0;
          for (VertexId u : fibers[f]) allowed[u] = 0;
          for (std::size_t k = 0; k < fibers[f].size(); ++k) {
            auto [gate, d] = ga[k];
            if (gate == kNoVertex) throw std::logic_error("build_oracle: fiber not gated");
            triplets[k].push_back({c, global[gate], d});
          }
        }
      }
      for (std::size_t k = 0; k < fibers[f].size(); ++k) {
        VertexId u = fibers[f][k];
        table_.labels[global[u]].push_back(
            UnbalancedRecord{sub, global[v0], lt.distance(u), lad, std::move(triplets[k])});
      }
    }
    for (auto& fiber : fibers) recurse(g, global, std::move(fiber), sub, depth);
  }

  // Multi-source BFS inside `allowed`; returns (gate, dist) for each target.
  std::vector<std::pair<VertexId, Dist>> local_gated_bfs(const Graph& g,
                                                         std::span<const VertexId> seeds,
                                                         std::span<const std::uint8_t> allowed,
                                                         std::span<const VertexId> targets) {
    const VertexId n = g.vertex_count();
    if (bfs_gate_.size() < n) {
      bfs_gate_.resize(n, kNoVertex);
      bfs_dist_.resize(n, kUnreached);
    }
    std::vector<VertexId> queue;
    for (VertexId s : seeds) {
      if (bfs_dist_[s] == 0) continue;
      bfs_gate_[s] = s;
      bfs_dist_[s] = 0;
      queue.push_back(s);
    }
    for (std::size_t h = 0; h < queue.size(); ++h) {
      VertexId v = queue[h];
      for (const auto& nb : g.neighbors(v)) {
        VertexId x = nb.vertex;
        if (!allowed[x] || bfs_dist_[x] != kUnreached) continue;
        bfs_dist_[x] = bfs_dist_[v] + 1;
        bfs_gate_[x] = bfs_gate_[v];
        queue.push_back(x);
      }
    }
    std::vector<std::pair<VertexId, Dist>> out;
    out.reserve(targets.size());
    for (VertexId x : targets) out.emplace_back(bfs_gate_[x], bfs_dist_[x]);
    for (VertexId v : queue) {
      bfs_gate_[v] = kNoVertex;
      bfs_dist_[v] = kUnreached;
    }
    return out;
  }

  LabelTable& table_;
  std::vector<VertexId> scratch_;
  std::vector<VertexId> bfs_gate_;
  std::vector<Dist> bfs_dist_;
};

}  // namespace detail

inline LabelTable build_oracle(const Graph& g) {
  LabelTable table;
  table.n = g.vertex_count();
  table.labels.resize(table.n);
  if (table.n == 0) return table;
  std::vector<VertexId> global(table.n);
  std::iota(global.begin(), global.end(), 0);
  detail::OracleBuilder builder(table);
  builder.build(g, std::move(global), kNoSubproblem, 0);
  return table;
}

enum class HopOrder { kLargestFirst, kSmallestFirst };

struct QueryStats {
  std::size_t lookups = 0;  // label fetches
  std::size_t levels = 0;
};

namespace detail {

inline ClassSet set_intersection(std::span<const ClassId> a, std::span<const ClassId> b) {
  ClassSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

inline ClassSet set_difference(std::span<const ClassId> a, std::span<const ClassId> b) {
  ClassSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace detail

// Exact distance from labels alone.
inline Dist query(const LabelTable& table, VertexId u, VertexId v, QueryStats* stats = nullptr,
                  HopOrder order = HopOrder::kLargestFirst) {
  QueryStats local;
  QueryStats& st = stats ? *stats : local;
  st = QueryStats{};
  auto fetch = [&](VertexId x, std::size_t level) -> const LevelRecord& {
    const auto& recs = table.records(x);
    if (level >= recs.size()) throw CorruptLabelTable("label of " + std::to_string(x) + " too short");
    return recs[level];
  };
  table.records(u);
  table.records(v);
  st.lookups = 2;
  Dist acc = 0;
  for (std::size_t level = 0;; ++level) {
    st.levels = level + 1;
    if (u == v) return acc;
    const LevelRecord& ru = fetch(u, level);
    const LevelRecord& rv = fetch(v, level);
    if (subproblem_of(ru) != subproblem_of(rv)) {
      throw CorruptLabelTable("vertices " + std::to_string(u) + " and " + std::to_string(v) +
                              " diverge at level " + std::to_string(level));
    }
    if (std::holds_alternative<LeafRecord>(ru)) return acc + 1;
    if (const auto* bu = std::get_if<BalancedRecord>(&ru)) {
      const auto* bv = std::get_if<BalancedRecord>(&rv);
      if (!bv) throw CorruptLabelTable("record kinds differ within a subproblem");
      if (bu->side != bv->side) {
        acc += bu->dist;
        u = bu->gate;
        ++st.lookups;
      }
      continue;
    }
    if (std::holds_alternative<CenterRecord>(ru)) {
      const auto* uv = std::get_if<UnbalancedRecord>(&rv);
      if (!uv) throw CorruptLabelTable("two centers in one subproblem");
      return acc + uv->dist;
    }
    const auto& uu = std::get<UnbalancedRecord>(ru);
    if (std::holds_alternative<CenterRecord>(rv)) return acc + uu.dist;
    const auto* uvp = std::get_if<UnbalancedRecord>(&rv);
    if (!uvp) throw CorruptLabelTable("record kinds differ within a subproblem");
    const auto& uv = *uvp;
    if (uu.ladder == uv.ladder) continue;
    ClassSet common = detail::set_intersection(uu.ladder, uv.ladder);
    if (common.empty()) return acc + uu.dist + uv.dist;

    // Walk each endpoint down to the fiber of the common ladder.
    auto walk = [&](VertexId x) -> VertexId {
      while (true) {
        const auto& rec = std::get_if<UnbalancedRecord>(&fetch(x, level));
        if (!rec || rec->sub != uu.sub) throw CorruptLabelTable("hop left the subproblem");
        if (rec->ladder == common) return x;
        ClassSet extra = detail::set_difference(rec->ladder, common);
        if (extra.empty() || common.size() + extra.size() != rec->ladder.size()) {
          throw CorruptLabelTable("hop reached an unrelated fiber");
        }
        ClassId c = order == HopOrder::kLargestFirst ? extra.back() : extra.front();
        auto it = std::lower_bound(rec->triplets.begin(), rec->triplets.end(), c,
                                   [](const FiberTriplet& a, ClassId k) { return a.removed < k; });
        if (it == rec->triplets.end() || it->removed != c) {
          throw CorruptLabelTable("missing fiber triplet for class " + std::to_string(c));
        }
        acc += it->dist;
        x = it->gate;
        ++st.lookups;
      }
    };
    u = walk(u);
    v = walk(v);
  }
}

struct LabelSize {
  std::size_t max_bits = 0;
  double mean_bits = 0;
};

inline unsigned ceil_log2(std::uint64_t n) {
  unsigned b = 0;
  while ((std::uint64_t{1} << b) < n) ++b;
  return b;
}

inline std::size_t record_bits(const LevelRecord& r, unsigned id_bits) {
  if (std::holds_alternative<BalancedRecord>(r)) return 3 * id_bits + 1;
  if (const auto* u = std::get_if<UnbalancedRecord>(&r)) {
    return u->ladder.size() * id_bits + id_bits + 3 * id_bits * u->triplets.size();
  }
  return 0;
}

inline LabelSize label_size_bits(const LabelTable& table) {
  LabelSize out;
  if (table.n == 0) return out;
  const unsigned id_bits = ceil_log2(table.n);
  std::size_t total = 0;
  for (const auto& recs : table.labels) {
    std::size_t bits = 0;
    for (const auto& r : recs) bits += record_bits(r, id_bits);
    out.max_bits = std::max(out.max_bits, bits);
    total += bits;
  }
  out.mean_bits = static_cast<double>(total) / table.n;
  return out;
}

// lu, ..., lu ∩ lv, ..., lv in one-class steps. With kLargestFirst, classes
// leave lu in descending id order and join toward lv in ascending order.
inline std::vector<ClassSet> ladder_sequence(const ClassSet& lu, const ClassSet& lv,
                                             HopOrder order = HopOrder::kLargestFirst) {
  ClassSet common = detail::set_intersection(lu, lv);
  ClassSet drop = detail::set_difference(lu, common);
  ClassSet add = detail::set_difference(lv, common);
  if (order == HopOrder::kLargestFirst) std::reverse(drop.begin(), drop.end());
  else std::reverse(add.begin(), add.end());
  std::vector<ClassSet> seq{lu};
  ClassSet cur = lu;
  for (ClassId c : drop) {
    cur.erase(std::find(cur.begin(), cur.end(), c));
    seq.push_back(cur);
  }
  for (ClassId c : add) {
    cur.insert(std::lower_bound(cur.begin(), cur.end(), c), c);
    seq.push_back(cur);
  }
  return seq;
}

// ---- text format -------------------------------------------------------------

inline void write_labels(std::ostream& os, const LabelTable& table) {
  os << "MEDDO 1 " << table.n << '\n';
  for (VertexId v = 0; v < table.n; ++v) {
    os << v << ' ' << table.labels[v].size() << '\n';
    for (const auto& r : table.labels[v]) {
      if (const auto* b = std::get_if<BalancedRecord>(&r)) {
        os << "B " << b->sub << ' ' << b->cls << ' ' << int{b->side} << ' ' << b->gate << ' '
           << b->dist << '\n';
      } else if (const auto* u = std::get_if<UnbalancedRecord>(&r)) {
        os << "U " << u->sub << ' ' << u->center << ' ' << u->dist << ' ' << u->ladder.size();
        for (ClassId c : u->ladder) os << ' ' << c;
        os << ' ' << u->triplets.size();
        for (const auto& tr : u->triplets) os << ' ' << tr.removed << ' ' << tr.gate << ' ' << tr.dist;
        os << '\n';
      } else if (const auto* c = std::get_if<CenterRecord>(&r)) {
        os << "C " << c->sub << '\n';
      } else {
        const auto& l = std::get<LeafRecord>(r);
        os << "L " << l.sub << ' ';
        if (l.partner == kNoVertex) os << '-';
        else os << l.partner;
        os << '\n';
      }
    }
  }
}

// Parses the text format and rebuilds the subproblem registry from the
// record sequences.
inline LabelTable read_labels(std::istream& is) {
  std::size_t line_no = 0;
  std::string line;
  auto next_tokens = [&]() {
    if (!std::getline(is, line)) throw CorruptLabelTable("unexpected end of file");
    ++line_no;
    return detail::split_line(line);
  };
  auto num = [&](const std::string& tok) {
    std::uint64_t x;
    if (!detail::parse_u64(tok, x)) {
      throw CorruptLabelTable("line " + std::to_string(line_no) + ": bad number '" + tok + "'");
    }
    return x;
  };
  auto header = next_tokens();
  if (header.size() != 3 || header[0] != "MEDDO" || header[1] != "1") {
    throw CorruptLabelTable("missing 'MEDDO 1 n' header");
  }
  LabelTable table;
  table.n = static_cast<VertexId>(num(header[2]));
  table.labels.resize(table.n);
  for (VertexId v = 0; v < table.n; ++v) {
    auto head = next_tokens();
    if (head.size() != 2 || num(head[0]) != v) {
      throw CorruptLabelTable("line " + std::to_string(line_no) + ": expected 'vid k' for " +
                              std::to_string(v));
    }
    auto k = num(head[1]);
    for (std::uint64_t r = 0; r < k; ++r) {
      auto tok = next_tokens();
      auto need = [&](std::size_t count) {
        if (tok.size() != count) {
          throw CorruptLabelTable("line " + std::to_string(line_no) + ": wrong field count");
        }
      };
      if (tok.empty()) throw CorruptLabelTable("empty record line");
      auto sub = static_cast<SubproblemId>(tok.size() > 1 ? num(tok[1]) : 0);
      if (tok[0] == "B") {
        need(6);
        auto side = num(tok[3]);
        if (side > 1) throw CorruptLabelTable("side bit above 1");
        table.labels[v].push_back(BalancedRecord{sub, static_cast<ClassId>(num(tok[2])),
                                                 static_cast<std::uint8_t>(side),
                                                 static_cast<VertexId>(num(tok[4])),
                                                 static_cast<Dist>(num(tok[5]))});
      } else if (tok[0] == "U") {
        if (tok.size() < 5) need(5);
        UnbalancedRecord u{sub, static_cast<VertexId>(num(tok[2])), static_cast<Dist>(num(tok[3])), {}, {}};
        std::size_t pos = 4;
        auto lsize = num(tok[pos++]);
        if (tok.size() < pos + lsize + 1) need(pos + lsize + 1);
        for (std::uint64_t i = 0; i < lsize; ++i) u.ladder.push_back(static_cast<ClassId>(num(tok[pos++])));
        auto tcount = num(tok[pos++]);
        need(pos + 3 * tcount);
        for (std::uint64_t i = 0; i < tcount; ++i, pos += 3) {
          u.triplets.push_back({static_cast<ClassId>(num(tok[pos])),
                                static_cast<VertexId>(num(tok[pos + 1])),
                                static_cast<Dist>(num(tok[pos + 2]))});
        }
        table.labels[v].push_back(std::move(u));
      } else if (tok[0] == "C") {
        need(2);
        table.labels[v].push_back(CenterRecord{sub});
      } else if (tok[0] == "L") {
        need(3);
        VertexId partner = tok[2] == "-" ? kNoVertex : static_cast<VertexId>(num(tok[2]));
        table.labels[v].push_back(LeafRecord{sub, partner});
      } else {
        throw CorruptLabelTable("line " + std::to_string(line_no) + ": unknown record '" + tok[0] + "'");
      }
    }
  }
  // Registry: parent is the previous level's subproblem, kind from the record.
  SubproblemId max_sub = 0;
  for (const auto& recs : table.labels)
    for (const auto& r : recs) max_sub = std::max(max_sub, subproblem_of(r) + 1);
  table.subproblems.assign(max_sub, Subproblem{kNoSubproblem, SubproblemKind::kLeaf, 0, 0});
  std::vector<std::uint8_t> seen(max_sub, 0);
  for (const auto& recs : table.labels) {
    for (std::size_t level = 0; level < recs.size(); ++level) {
      SubproblemId s = subproblem_of(recs[level]);
      SubproblemId parent = level == 0 ? kNoSubproblem : subproblem_of(recs[level - 1]);
      SubproblemKind kind = std::holds_alternative<BalancedRecord>(recs[level])
                                ? SubproblemKind::kBalanced
                                : std::holds_alternative<LeafRecord>(recs[level])
                                      ? SubproblemKind::kLeaf
                                      : SubproblemKind::kUnbalanced;
      auto& entry = table.subproblems[s];
      if (seen[s] && (entry.parent != parent || entry.kind != kind)) {
        throw CorruptLabelTable("subproblem " + std::to_string(s) + " has inconsistent records");
      }
      seen[s] = 1;
      entry.parent = parent;
      entry.kind = kind;
      entry.depth = static_cast<std::uint32_t>(level);
      ++entry.size;
    }
  }
  return table;
}

}  // namespace medgraph
