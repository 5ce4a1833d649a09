#pragma once

#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sadim/common.hpp"

namespace sadim {

// Coordinates [offset, offset + dim) of the permuted generator share one
// expansion modulus. Groups are sorted by increasing modulus.
struct ModulusGroup {
  double modulus = 0;
  std::int64_t modulusSquared = 0;  // exact |lambda|^2
  int offset = 0;
  int dim = 0;
};

struct AuxiliaryTile {
  IntMatrix T;               // generator with coordinates permuted into group order
  std::vector<int> order;    // permuted coordinate i is original coordinate order[i]
  std::vector<IntVec> Dprime;
  IntVec a;                  // D = a + c0 * Dprime
  std::int64_t c0 = 1;
  std::vector<ModulusGroup> groups;
  bool cube = false;         // cube fallback: T replaced by m I for mesh geometry only
  std::int64_t det = 0;
  IntMatrix adj;

  IntVec permute(const IntVec& v) const;    // original -> tile coordinates
  IntVec unpermute(const IntVec& v) const;  // tile -> original coordinates
  int residue_index(const IntVec& z) const; // index in Dprime of the digit congruent to z
  IntVec quotient(const IntVec& z) const;   // T^{-1}(z - r(z)), exact
  IntSystem gamma() const;                  // F(T, a + c0 Dprime) in tile coordinates

  std::unordered_map<IntVec, int, IntVecHash> residueKey;
  IntVec key(const IntVec& z) const;
};

// Complete residue system for the supported generator shapes: 1x1 blocks,
// 2x2 rotation-scaled blocks, triangular blocks with constant diagonal and
// block-triangular chains of equal rotation blocks, after a coordinate
// permutation. With allowCube the fallback M = m I (m = floor of the least
// modulus) is returned instead of throwing UnsupportedShape.
AuxiliaryTile auxiliary_tile(const IntMatrix& T, bool allowCube = false);

struct LabeledGraph {
  std::vector<std::vector<IntVec>> vertices;              // sorted offset sets; vertices[0] is the root
  std::vector<IntVec> labels;                             // label alphabet
  std::vector<std::vector<std::pair<int, int>>> out;      // per vertex: (label index, target), sorted
  std::vector<std::vector<int>> members;  // projected graphs: source vertices of each subset
  int width = 1;  // labels are `width` concatenated n-vectors (power graphs)
  int n = 0;

  IntMatrix adjacency() const;
  bool right_resolving() const;
  std::size_t edge_count() const;
};

struct DeconOptions {
  std::size_t maxVertices = 20000;
  std::size_t maxOffsets = std::size_t(1) << 18;
};

// Digits are given in original coordinates.
LabeledGraph delta_closure(const IntMatrix& T, const std::vector<IntVec>& A, const AuxiliaryTile& tile,
                           const DeconOptions& opt = {});

// Keeps the first `coords` coordinates of each n-chunk of every label and
// determinizes from the root.
LabeledGraph project_coords(const LabeledGraph& G, int coords, const DeconOptions& opt = {});

// Projection onto the first p modulus groups of the tile (1 <= p <= groups).
LabeledGraph project_graph(const LabeledGraph& G, const AuxiliaryTile& tile, int p, const DeconOptions& opt = {});

// Words of length `len` readable from the root, each word as the concatenated labels.
std::vector<std::vector<IntVec>> label_language(const LabeledGraph& G, int len, std::size_t budget = 1u << 22);

struct FrobeniusComponent {
  std::vector<int> vertices;                 // sorted
  int period = 0;                            // 0 for a single vertex without a loop
  std::vector<std::vector<int>> classes;     // cyclic classes, classes[c] sorted
  std::vector<IntMatrix> blocks;             // C^period restricted to each class
  double spectralRadius = 0;
  bool trivial() const { return period == 0; }
};

struct FrobeniusDecomposition {
  std::vector<FrobeniusComponent> components;
  int p = 1;  // lcm of periods of nontrivial components
};

FrobeniusDecomposition frobenius_decompose(const IntMatrix& B);

bool is_primitive(const IntMatrix& B);

std::string to_dot(const LabeledGraph& G);

}  // namespace sadim
