#pragma once

#include <string>
#include <utility>
#include <vector>

#include "sadim/common.hpp"

namespace sadim {

struct NeighborOptions {
  std::size_t latticeBudget = std::size_t(1) << 20;  // candidate lattice points
  std::size_t pathBudget = std::size_t(1) << 22;     // label sequences in path queries
};

using LabelPair = std::pair<int, int>;

struct NeighborGraph {
  IntMatrix T;
  std::vector<IntVec> digits;    // indexed, duplicates allowed
  std::vector<IntVec> vertices;  // vertices[0] is the root (zero offset)
  std::vector<IntVec> diffs;     // distinct differences a_j - a_i
  std::vector<std::vector<LabelPair>> diffPairs;           // (i, j) pairs realising each difference
  std::vector<std::vector<std::pair<int, int>>> out;       // per vertex: (diff index, target)

  int find(const IntVec& s) const;  // -1 when absent
  std::vector<IntVec> offsets() const;  // non-root vertices
  std::size_t labeled_edge_count() const;
};

NeighborGraph neighbor_graph(const IntSystem& sys, const NeighborOptions& opt = {});

bool is_symmetric(const NeighborGraph& G);

// Label sequences of r-paths starting at the root, sorted.
std::vector<std::vector<LabelPair>> path_labels(const NeighborGraph& G, int r, const NeighborOptions& opt = {});

// Compares r-prefixes of root paths of Gk (digits of level k, |digits| = q^k)
// with r-paths of Gref (q digits).
bool graphs_match(const NeighborGraph& Gref, const NeighborGraph& Gk, int r, const NeighborOptions& opt = {});

bool is_connected_attractor(const IntSystem& sys, const NeighborOptions& opt = {});

std::string to_dot(const NeighborGraph& G);

}  // namespace sadim
