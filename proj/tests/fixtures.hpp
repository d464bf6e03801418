#pragma once

#include <random>
#include <vector>

#include "medgraph/graph.hpp"
#include "medgraph/testkit.hpp"

namespace medgraph::fixtures {

// A 21-vertex median graph with a 6-edge class and a 3-edge class listed
// below. Ids follow the point names 0 P11, 1 P12, 2 P21, 3 P22, 4 P23,
// 5 P31, 6 P32, 7 P33, 8 P41, 9 P42, 10 P43, 11 P44, 12 P51, 13 P52, 14 P61,
// 15 P62, 16 P45, 17 P71, 18 P72, 19 P73, 20 P74. Ladder tests use basepoint
// 6 with targets 19 and 8.
inline Graph example_graph() {
  return Graph::from_edges(21, {{0, 1},   {0, 2},   {1, 3},   {2, 3},   {2, 5},   {3, 6},
                                {5, 6},   {3, 4},   {4, 7},   {6, 7},   {3, 8},   {1, 10},
                                {4, 9},   {8, 10},  {8, 9},   {1, 11},  {4, 12},  {7, 13},
                                {12, 13}, {5, 14},  {6, 15},  {14, 15}, {10, 16}, {17, 18},
                                {17, 19}, {18, 20}, {19, 20}, {5, 17},  {6, 18},  {14, 19},
                                {15, 20}});
}
inline const std::vector<Edge> kDottedClass = {{0, 1}, {2, 3}, {5, 6}, {14, 15}, {17, 18}, {19, 20}};
inline const std::vector<Edge> kDashedClass = {{1, 10}, {3, 8}, {4, 9}};

inline Graph star(VertexId leaves) {
  std::vector<Edge> edges;
  for (VertexId i = 1; i <= leaves; ++i) edges.push_back({0, i});
  return Graph::from_edges(leaves + 1, std::move(edges));
}

inline Graph k23() {
  return Graph::from_edges(5, {{0, 2}, {0, 3}, {0, 4}, {1, 2}, {1, 3}, {1, 4}});
}

inline Graph cycle(VertexId n) {
  std::vector<Edge> edges;
  for (VertexId i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n});
  return Graph::from_edges(n, std::move(edges));
}

// Square 0-1-3-2 at the centre 0, a path 3-4-5, and 34 leaves on 0. Every
// class is unbalanced for the 2 ln n threshold; the ladder toward 5 has two
// classes, giving slices {1,3,4,5} and {2}.
inline Graph two_slice_graph() {
  std::vector<Edge> edges{{0, 1}, {0, 2}, {1, 3}, {2, 3}, {3, 4}, {4, 5}};
  for (VertexId k = 6; k < 40; ++k) edges.push_back({0, k});
  return Graph::from_edges(40, std::move(edges));
}

// Q_3 on ids 0..7 (bit b is class b) with 10 leaves on vertex 0: no class
// splits off a third, so the oracle treats it as unbalanced around 0.
inline Graph cube_corner_graph() {
  auto cube = testkit::hypercube(3);
  std::vector<Edge> edges = cube.edges();
  for (VertexId k = 8; k < 18; ++k) edges.push_back({0, k});
  return Graph::from_edges(18, std::move(edges));
}

// Small graphs covering every generator, for exhaustive property loops.
inline std::vector<Graph> small_family() {
  std::vector<Graph> out;
  out.push_back(testkit::path(1));
  out.push_back(testkit::path(2));
  out.push_back(testkit::path(7));
  out.push_back(star(5));
  out.push_back(testkit::grid({2, 3}));
  out.push_back(testkit::grid({4, 4}));
  out.push_back(testkit::grid({3, 3, 2}));
  out.push_back(testkit::hypercube(3));
  out.push_back(testkit::hypercube(4));
  out.push_back(example_graph());
  out.push_back(two_slice_graph());
  out.push_back(cube_corner_graph());
  out.push_back(testkit::cartesian_product(star(3), testkit::path(3)));
  out.push_back(testkit::cartesian_product(testkit::random_tree(9, 4), testkit::random_tree(7, 5)));
  for (std::uint64_t s = 0; s < 6; ++s) out.push_back(testkit::random_tree(40, s));
  for (std::uint64_t s = 0; s < 12; ++s) {
    out.push_back(testkit::median_closure(6 + s % 3, 5 + s, s));
    out.push_back(testkit::median_closure(8, 12 + s, 100 + s, testkit::SeedMode::kWalk));
  }
  return out;
}

inline std::vector<Dist> random_weights(VertexId n, Dist max, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Dist> pick(0, max);
  std::vector<Dist> w(n);
  for (auto& x : w) x = pick(rng);
  return w;
}

}  // namespace medgraph::fixtures
