#include <gtest/gtest.h>

#include <random>
#include <set>

#include "oracles.hpp"
#include "sadim/ifs.hpp"
#include "sadim/linalg.hpp"
#include "sadim/neighbor.hpp"

using namespace sadim;

namespace {

IntSystem twin_dragon() { return {IntMatrix{{1, -1}, {1, 1}}, {{0, 0}, {1, 0}}}; }

std::set<IntVec> offset_set(const NeighborGraph& G) {
  auto o = G.offsets();
  return {o.begin(), o.end()};
}

// every labeled transition s -> T s + a_j - a_i that lands on a vertex is an edge
void expect_closed(const NeighborGraph& G) {
  std::set<IntVec> verts(G.vertices.begin(), G.vertices.end());
  for (size_t v = 0; v < G.vertices.size(); ++v) {
    std::set<std::pair<IntVec, int>> expected;
    IntVec ts = G.T.apply(G.vertices[v]);
    for (size_t i = 0; i < G.digits.size(); ++i)
      for (size_t j = 0; j < G.digits.size(); ++j) {
        IntVec t = ts + G.digits[j] - G.digits[i];
        if (verts.count(t)) expected.insert({G.digits[j] - G.digits[i], G.find(t)});
      }
    std::set<std::pair<IntVec, int>> got;
    for (auto [d, t] : G.out[v]) got.insert({G.diffs[d], t});
    EXPECT_EQ(got, expected) << "vertex " << v;
    EXPECT_FALSE(G.out[v].empty());
  }
}

double cloud_gap(const std::vector<Eigen::VectorXd>& pts, const IntVec& s) {
  Eigen::VectorXd sv = to_eigen(s);
  double best = 1e300;
  for (const auto& a : pts)
    for (const auto& b : pts) best = std::min(best, (a - (b + sv)).norm());
  return best;
}

std::vector<IntSystem> random_systems(int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> e(-3, 3), dsz(2, 4);
  std::vector<IntSystem> out;
  while (static_cast<int>(out.size()) < count) {
    const int n = 1 + static_cast<int>(rng() % 2);
    IntMatrix T(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) T(i, j) = e(rng);
    try {
      if (!is_expanding(T)) continue;
    } catch (const Error&) {
      continue;
    }
    std::vector<IntVec> A{IntVec(n, 0)};
    const int q = dsz(rng);
    while (static_cast<int>(A.size()) < q) {
      IntVec a(n);
      for (auto& x : a) x = e(rng);
      A.push_back(a);
    }
    out.push_back({T, A});
  }
  return out;
}

}  // namespace

TEST(NeighborGraph, IntervalHasUnitOffsets) {
  NeighborGraph G = neighbor_graph({IntMatrix{{2}}, {{0}, {1}}});
  EXPECT_EQ(offset_set(G), (std::set<IntVec>{{-1}, {1}}));
  EXPECT_EQ(G.vertices[0], IntVec{0});
  expect_closed(G);
  std::string dot = to_dot(G);
  EXPECT_NE(dot.find("(1)"), std::string::npos);
  EXPECT_NE(dot.find("(-1)"), std::string::npos);
}

TEST(NeighborGraph, TwinDragonHasSixNeighbors) {
  IntSystem s = twin_dragon();
  NeighborGraph G = neighbor_graph(s);
  EXPECT_EQ(G.offsets().size(), 6u);
  expect_closed(G);
  PointCloud c = attractor_points(RealSystem::from(s), 12);
  for (const auto& off : G.offsets()) EXPECT_LE(cloud_gap(c.points, off), 2 * c.errorRadius) << off[0] << "," << off[1];
}

TEST(NeighborGraph, OffsetsHaveCloudWitnesses) {
  for (const IntSystem& s : {IntSystem{IntMatrix{{2, 0}, {0, 2}}, {{0, 0}, {1, 0}, {0, 1}}},
                             IntSystem{IntMatrix{{2, 0}, {0, 3}}, {{0, 0}, {1, 1}, {0, 2}}},
                             IntSystem{IntMatrix{{0, -2}, {1, 0}}, {{0, 0}, {1, 0}}},
                             IntSystem{IntMatrix{{3}}, {{0}, {1}, {5}}}}) {
    NeighborGraph G = neighbor_graph(s);
    expect_closed(G);
    PointCloud c = attractor_points(RealSystem::from(s), 6);
    for (const auto& off : G.offsets()) EXPECT_LE(cloud_gap(c.points, off), 2 * c.errorRadius);
    // lattice points with clearly separated clouds are not vertices
    const double R = diam_upper_bound(RealSystem::from(s));
    std::set<IntVec> verts = offset_set(G);
    const int n = s.dim();
    const int r = static_cast<int>(std::ceil(R));
    for (int x = -r; x <= r; ++x)
      for (int y = (n == 2 ? -r : 0); y <= (n == 2 ? r : 0); ++y) {
        IntVec off = n == 2 ? IntVec{x, y} : IntVec{x};
        if (off == IntVec(n, 0)) continue;
        if (cloud_gap(c.points, off) > 2 * c.errorRadius + 1e-9) EXPECT_FALSE(verts.count(off));
      }
  }
}

TEST(NeighborGraph, SymmetricOnRandomSystems) {
  for (const IntSystem& s : random_systems(40, 17)) {
    NeighborGraph G = neighbor_graph(s);
    EXPECT_TRUE(is_symmetric(G));
    expect_closed(G);
  }
  EXPECT_TRUE(is_symmetric(neighbor_graph(twin_dragon())));
}

TEST(NeighborGraph, CantorSetTouchesOnlyAtEndpoints) {
  // F meets F + 1 in the single point 1, yet the pieces F/3 and (F+2)/3 are apart
  NeighborGraph G = neighbor_graph({IntMatrix{{3}}, {{0}, {2}}});
  EXPECT_EQ(offset_set(G), (std::set<IntVec>{{-1}, {1}}));
  EXPECT_FALSE(is_connected_attractor({IntMatrix{{3}}, {{0}, {2}}}));
  EXPECT_TRUE(is_connected_attractor({IntMatrix{{2}}, {{0}, {1}}}));
  EXPECT_TRUE(is_connected_attractor(twin_dragon()));
  EXPECT_TRUE(is_connected_attractor({IntMatrix{{2, 0}, {0, 2}}, {{0, 0}, {1, 0}, {0, 1}}}));
}

TEST(PathLabels, RootLoopsAreDiagonalPairs) {
  NeighborGraph G = neighbor_graph({IntMatrix{{2}}, {{0}, {1}}});
  auto paths = path_labels(G, 2);
  EXPECT_TRUE(std::is_sorted(paths.begin(), paths.end()));
  // four first steps; the two root loops branch four ways again, the exits to +-1 once
  EXPECT_EQ(paths.size(), 10u);
}

TEST(GraphsMatch, ExactLevelSystemMatchesReference) {
  IntSystem s{IntMatrix{{2, 0}, {0, 2}}, {{0, 0}, {1, 0}, {0, 1}}};
  NeighborGraph ref = neighbor_graph(s);
  for (int k : {2, 3}) {
    IntSystem sk{s.T.pow(k), compose_digits_indexed(s.T, s.A, k)};
    NeighborGraph Gk = neighbor_graph(sk);
    EXPECT_TRUE(graphs_match(ref, Gk, 2)) << "k=" << k;
  }
  // collinear digits overlap, so root paths differ
  IntSystem other{IntMatrix{{4, 0}, {0, 4}}, compose_digits_indexed(s.T, {{0, 0}, {1, 0}, {2, 0}}, 2)};
  EXPECT_FALSE(graphs_match(ref, neighbor_graph(other), 2));
}
