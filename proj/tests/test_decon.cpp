#include <gtest/gtest.h>

#include <random>
#include <set>

#include "oracles.hpp"
#include "sadim/decon.hpp"
#include "sadim/linalg.hpp"

using namespace sadim;

namespace {

struct Fixture {
  const char* name;
  IntSystem sys;
};

std::vector<Fixture> fixtures() {
  return {
      {"interval", {IntMatrix{{2}}, {{0}, {1}}}},
      {"cantor", {IntMatrix{{3}}, {{0}, {2}}}},
      {"gasket", {IntMatrix{{2, 0}, {0, 2}}, {{0, 0}, {1, 0}, {0, 1}}}},
      {"carpet", {IntMatrix{{2, 0}, {0, 3}}, {{0, 0}, {1, 1}, {0, 2}}}},
      {"jordan", {IntMatrix{{2, 0}, {1, 2}}, {{0, 0}, {1, 0}, {0, 1}}}},
      {"overlap23", {IntMatrix{{2, 0}, {0, 3}}, {{0, 0}, {1, 2}, {2, 1}, {3, 5}}}},
      {"overlap24", {IntMatrix{{2, 0}, {0, 4}}, {{0, 0}, {3, 1}, {1, 6}, {2, 3}, {5, 5}}}},
      {"overlap32", {IntMatrix{{3, 0}, {0, 2}}, {{0, 0}, {1, 1}, {4, 0}, {2, 3}}}},
      {"jordan-overlap", {IntMatrix{{2, 0}, {1, 2}}, {{0, 0}, {3, 1}, {1, 4}}}},
      {"negative", {IntMatrix{{-2, 0}, {0, -2}}, {{0, 0}, {1, 0}, {0, 1}, {1, 1}, {2, 1}}}},
      {"sponge3", {IntMatrix{{2, 0, 0}, {0, 3, 0}, {0, 0, 4}}, {{0, 0, 0}, {1, 1, 1}, {0, 2, 3}, {1, 0, 2}}}},
  };
}

// z1 - z2 in T Z^n  <=>  adj(T)(z1 - z2) = 0 mod det
bool congruent(const IntMatrix& T, const IntVec& a, const IntVec& b) {
  IntVec k = T.adjugate().apply(a - b);
  const std::int64_t d = std::llabs(T.det());
  for (auto x : k)
    if (x % d != 0) return false;
  return true;
}

std::set<std::vector<IntVec>> projected_words(const LabeledGraph& G, int len, int coords) {
  std::set<std::vector<IntVec>> out;
  for (const auto& w : label_language(G, len)) {
    std::vector<IntVec> p;
    for (const auto& l : w) {
      IntVec q;
      for (int c = 0; c < G.width; ++c)
        for (int i = 0; i < coords; ++i) q.push_back(l[c * G.n + i]);
      p.push_back(q);
    }
    out.insert(p);
  }
  return out;
}

}  // namespace

TEST(AuxiliaryTile, CompleteResidueSystems) {
  for (const IntMatrix& T : {IntMatrix{{3}}, IntMatrix{{-2}}, IntMatrix{{2, 0}, {0, 3}}, IntMatrix{{2, 0}, {1, 2}},
                             IntMatrix{{2, 1}, {0, 2}}, IntMatrix{{1, -1}, {1, 1}}, IntMatrix{{0, -2}, {2, 0}},
                             IntMatrix{{3, 0, 0}, {1, 3, 0}, {0, 0, 2}}, IntMatrix{{2, -1, 0, 0}, {1, 2, 0, 0}, {1, 0, 2, -1}, {0, 1, 1, 2}}}) {
    AuxiliaryTile tile = auxiliary_tile(T);
    ASSERT_EQ(static_cast<std::int64_t>(tile.Dprime.size()), std::llabs(T.det()));
    for (size_t i = 0; i < tile.Dprime.size(); ++i)
      for (size_t j = i + 1; j < tile.Dprime.size(); ++j)
        EXPECT_FALSE(congruent(tile.T, tile.Dprime[i], tile.Dprime[j]));
    EXPECT_EQ(tile.T, T.permuted(tile.order));
    for (size_t g = 1; g < tile.groups.size(); ++g) EXPECT_LT(tile.groups[g - 1].modulus, tile.groups[g].modulus);
  }
}

TEST(AuxiliaryTile, QuotientIdentity) {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> e(-40, 40);
  for (const IntMatrix& T : {IntMatrix{{2, 0}, {1, 2}}, IntMatrix{{1, -1}, {1, 1}}, IntMatrix{{2, 0}, {0, 3}}}) {
    AuxiliaryTile tile = auxiliary_tile(T);
    for (int i = 0; i < 200; ++i) {
      IntVec z{e(rng), e(rng)};
      IntVec q = tile.quotient(z);
      EXPECT_EQ(tile.T.apply(q) + tile.Dprime[tile.residue_index(z)], z);
    }
  }
}

TEST(AuxiliaryTile, UnsupportedShapes) {
  EXPECT_THROW(auxiliary_tile(IntMatrix{{2, 1}, {1, 3}}), Error);
  EXPECT_THROW(auxiliary_tile(IntMatrix{{2, 0}, {1, 3}}), Error);
  // least modulus (7 - sqrt 5) / 2 gives the cube generator 2 I
  AuxiliaryTile cube = auxiliary_tile(IntMatrix{{3, 1}, {1, 4}}, true);
  EXPECT_TRUE(cube.cube);
  EXPECT_EQ(cube.T, IntMatrix::diagonal({2, 2}));
  EXPECT_THROW(auxiliary_tile(IntMatrix{{2, 1}, {1, 3}}, true), Error);
}

TEST(DeltaClosure, StructuralInvariants) {
  for (const auto& f : fixtures()) {
    AuxiliaryTile tile = auxiliary_tile(f.sys.T);
    LabeledGraph G = delta_closure(f.sys.T, f.sys.A, tile);
    SCOPED_TRACE(f.name);
    EXPECT_TRUE(G.right_resolving());
    IntMatrix B = G.adjacency();
    const int V = B.size();
    for (int i = 0; i < V; ++i) {
      std::int64_t row = 0;
      for (int j = 0; j < V; ++j) row += B(i, j);
      EXPECT_GE(row, 1);  // no sinks
      EXPECT_LE(row, std::llabs(f.sys.T.det()));
    }
    // every vertex is reachable from the root
    auto reach = oracle::reachability(B);
    for (int v = 1; v < V; ++v) EXPECT_TRUE(reach[0][v]) << "vertex " << v;
    for (const auto& vs : G.vertices) EXPECT_TRUE(std::is_sorted(vs.begin(), vs.end()));
    EXPECT_LE(spectral_radius(B), std::llabs(f.sys.T.det()) + 1e-9);
  }
}

TEST(DeltaClosure, TilesGiveFullShift) {
  // complete residue systems read every word
  for (const IntSystem& s : {IntSystem{IntMatrix{{3}}, {{0}, {1}, {5}}}, IntSystem{IntMatrix{{2, 0}, {0, 2}}, {{0, 0}, {1, 0}, {0, 1}, {1, 1}}},
                             IntSystem{IntMatrix{{1, -1}, {1, 1}}, {{0, 0}, {1, 0}}}}) {
    AuxiliaryTile tile = auxiliary_tile(s.T);
    LabeledGraph G = delta_closure(s.T, s.A, tile);
    const double d = std::llabs(s.T.det());
    EXPECT_NEAR(spectral_radius(G.adjacency()), d, 1e-9);
    EXPECT_EQ(label_language(G, 3).size(), static_cast<size_t>(d * d * d));
  }
}

TEST(Projection, LanguageMatchesProjectedWords) {
  for (const auto& f : fixtures()) {
    SCOPED_TRACE(f.name);
    AuxiliaryTile tile = auxiliary_tile(f.sys.T);
    LabeledGraph G = delta_closure(f.sys.T, f.sys.A, tile);
    for (const auto& grp : tile.groups) {
      const int coords = grp.offset + grp.dim;
      LabeledGraph H = project_coords(G, coords);
      EXPECT_TRUE(H.right_resolving());
      for (int len = 1; len <= 6; ++len) {
        auto words = label_language(H, len);
        EXPECT_EQ(std::set<std::vector<IntVec>>(words.begin(), words.end()), projected_words(G, len, coords))
            << "len " << len;
      }
    }
  }
}

TEST(Projection, SpectralRadiusIsMonotone) {
  for (const auto& f : fixtures()) {
    SCOPED_TRACE(f.name);
    AuxiliaryTile tile = auxiliary_tile(f.sys.T);
    LabeledGraph G = delta_closure(f.sys.T, f.sys.A, tile);
    double prev = 1;
    for (size_t p = 1; p <= tile.groups.size(); ++p) {
      double rho = spectral_radius(project_graph(G, tile, static_cast<int>(p)).adjacency());
      EXPECT_LE(prev, rho + 1e-9);
      prev = rho;
    }
    EXPECT_NEAR(prev, spectral_radius(G.adjacency()), 1e-9);
  }
}

TEST(Frobenius, AgreesWithBruteForce) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    IntMatrix B = oracle::random_nonnegative(rng, 1 + trial % 6, 3, 0.15 + 0.1 * (trial % 5));
    FrobeniusDecomposition fd = frobenius_decompose(B);
    auto comps = oracle::sccs(B);
    ASSERT_EQ(fd.components.size(), comps.size());
    std::int64_t lcm = 1;
    for (size_t c = 0; c < comps.size(); ++c) {
      const auto& fc = fd.components[c];
      EXPECT_EQ(fc.vertices, comps[c]);
      const int per = oracle::period(B, comps[c]);
      EXPECT_EQ(fc.period, per);
      if (per == 0) continue;
      lcm = std::lcm(lcm, std::int64_t(per));
      EXPECT_NEAR(fc.spectralRadius, oracle::spectral_radius(oracle::restrict(B, comps[c])), 1e-8);
      // edges advance the cyclic class by one
      std::vector<int> cls(B.size(), -1);
      for (int k = 0; k < per; ++k)
        for (int v : fc.classes[k]) cls[v] = k;
      for (int u : comps[c])
        for (int v : comps[c])
          if (B(u, v) > 0) EXPECT_EQ(cls[v], (cls[u] + 1) % per);
      for (const auto& blk : fc.blocks) EXPECT_TRUE(oracle::primitive(blk));
    }
    EXPECT_EQ(fd.p, lcm);
    EXPECT_EQ(is_primitive(B), oracle::primitive(B));
  }
}

TEST(Frobenius, KnownCycles) {
  IntMatrix cyc{{0, 1, 0}, {0, 0, 1}, {1, 0, 0}};
  auto fd = frobenius_decompose(cyc);
  ASSERT_EQ(fd.components.size(), 1u);
  EXPECT_EQ(fd.components[0].period, 3);
  EXPECT_EQ(fd.p, 3);
  EXPECT_FALSE(is_primitive(cyc));
  EXPECT_TRUE(is_primitive(IntMatrix{{1, 1}, {1, 0}}));
  EXPECT_THROW(frobenius_decompose(IntMatrix{{1, -1}, {0, 1}}), Error);
}

TEST(LabelLanguage, BudgetIsEnforced) {
  AuxiliaryTile tile = auxiliary_tile(IntMatrix{{2, 0}, {0, 2}});
  LabeledGraph G = delta_closure(IntMatrix{{2, 0}, {0, 2}}, {{0, 0}, {1, 0}, {0, 1}, {1, 1}}, tile);
  EXPECT_THROW(label_language(G, 12, 1000), Error);
}
