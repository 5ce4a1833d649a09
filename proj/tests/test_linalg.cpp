#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "sadim/linalg.hpp"

using namespace sadim;

namespace {

IntMatrix random_int(std::mt19937_64& rng, int n, int bound) {
  std::uniform_int_distribution<int> d(-bound, bound);
  IntMatrix M(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) M(i, j) = d(rng);
  return M;
}

// Horner evaluation in doubles
double eval(const Polynomial& p, double x) {
  double v = 0;
  for (int i = p.degree(); i >= 0; --i) v = v * x + static_cast<double>(p.coeffs[i]);
  return v;
}

}  // namespace

TEST(CharPoly, KnownMatrices) {
  EXPECT_EQ(char_poly(IntMatrix{{2}}).coeffs, (std::vector<std::int64_t>{-2, 1}));
  EXPECT_EQ(char_poly(IntMatrix{{0, -2}, {1, 0}}).coeffs, (std::vector<std::int64_t>{2, 0, 1}));
  EXPECT_EQ(char_poly(IntMatrix{{2, 0}, {1, 2}}).coeffs, (std::vector<std::int64_t>{4, -4, 1}));
}

TEST(CharPoly, MatchesDeterminantAndAnnihilates) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 1 + trial % 4;
    IntMatrix M = random_int(rng, n, 4);
    Polynomial p = char_poly(M);
    ASSERT_EQ(p.degree(), n);
    EXPECT_EQ(p.coeffs.back(), 1);
    EXPECT_TRUE(annihilates(p, M));
    for (double x : {-1.5, 0.25, 2.0, 3.5}) {
      Eigen::MatrixXd A = x * Eigen::MatrixXd::Identity(n, n) - M.to_eigen();
      EXPECT_NEAR(eval(p, x), A.determinant(), 1e-8 * (1 + std::fabs(A.determinant())));
    }
  }
}

TEST(Eigenvalues, AgreeWithDenseSolver) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 1 + trial % 4;
    IntMatrix M = random_int(rng, n, 5);
    auto spec = eigenvalues(M);
    int total = 0;
    for (const auto& r : spec.roots) total += r.multiplicity;
    ASSERT_EQ(total, n);
    Eigen::EigenSolver<Eigen::MatrixXd> es(M.to_eigen(), false);
    for (int i = 0; i < n; ++i) {
      double best = 1e9;
      for (const auto& r : spec.roots) best = std::min(best, std::abs(r.value - es.eigenvalues()[i]));
      // repeated roots perturb the dense solver like sqrt(eps)
      EXPECT_LT(best, 1e-5) << "trial " << trial;
    }
  }
}

TEST(Eigenvalues, RepeatedRootsAreExact) {
  auto spec = eigenvalues(IntMatrix{{2, 0, 0}, {1, 2, 0}, {0, 1, 2}});
  ASSERT_EQ(spec.roots.size(), 1u);
  EXPECT_EQ(spec.roots[0].multiplicity, 3);
  EXPECT_DOUBLE_EQ(spec.roots[0].value.real(), 2.0);
  EXPECT_DOUBLE_EQ(spec.roots[0].value.imag(), 0.0);
}

TEST(Expanding, Classification) {
  EXPECT_TRUE(is_expanding(IntMatrix{{2}}));
  EXPECT_TRUE(is_expanding(IntMatrix{{0, -2}, {1, 0}}));
  EXPECT_TRUE(is_expanding(IntMatrix{{1, -1}, {1, 1}}));
  EXPECT_FALSE(is_expanding(IntMatrix{{3, 1}, {1, 0}}));
  EXPECT_THROW(is_expanding(IntMatrix{{1, 1}, {0, 2}}), Error);
}

TEST(Jordan, ReconstructsMatrix) {
  for (const IntMatrix& M : {IntMatrix{{2, 0}, {0, 3}}, IntMatrix{{0, -2}, {1, 0}}, IntMatrix{{2, 1}, {0, 2}},
                             IntMatrix{{1, -1}, {1, 1}}, IntMatrix{{3, 1, 0}, {0, 3, 1}, {0, 0, 3}},
                             IntMatrix{{2, 1}, {1, 3}}, IntMatrix{{0, 0, 2}, {1, 0, 0}, {0, 1, 0}}}) {
    JordanData jd = real_jordan_form(M);
    Eigen::MatrixXd back = jd.P * jd.J * jd.P.inverse();
    EXPECT_LT((back - M.to_eigen()).norm(), 1e-8);
    EXPECT_GT(jd.latticeGap, M.size());
    int dim = 0;
    for (const auto& b : jd.blocks) dim += b.dim();
    EXPECT_EQ(dim, M.size());
  }
}

TEST(Jordan, LowerChainForm) {
  JordanData jd = real_jordan_form(IntMatrix{{2, 1}, {0, 2}});
  ASSERT_EQ(jd.blocks.size(), 1u);
  EXPECT_EQ(jd.blocks[0].size, 2);
  EXPECT_NEAR(jd.J(0, 0), 2, 1e-12);
  EXPECT_NEAR(jd.J(1, 1), 2, 1e-12);
  EXPECT_NEAR(jd.J(1, 0), 1, 1e-12);
  EXPECT_NEAR(jd.J(0, 1), 0, 1e-12);
}

TEST(Jordan, RotationBlock) {
  JordanData jd = real_jordan_form(IntMatrix{{0, -2}, {1, 0}});
  ASSERT_EQ(jd.blocks.size(), 1u);
  EXPECT_TRUE(jd.blocks[0].complex);
  EXPECT_NEAR(jd.blocks[0].modulus, std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(jd.J(0, 0), jd.J(1, 1), 1e-12);
  EXPECT_NEAR(jd.J(0, 1), -jd.J(1, 0), 1e-12);
}

TEST(Jordan, RejectsContraction) { EXPECT_THROW(real_jordan_form(IntMatrix{{3, 1}, {1, 0}}), Error); }

TEST(LatticeGap, BruteForceShortestVector) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd P(2, 2);
    P << u(rng), u(rng), u(rng), u(rng);
    if (std::fabs(P.determinant()) < 0.2) continue;
    Eigen::MatrixXd Q = P.inverse();
    double best = 1e300;
    for (int a = -30; a <= 30; ++a)
      for (int b = -30; b <= 30; ++b)
        if (a || b) best = std::min(best, (Q * Eigen::Vector2d(a, b)).norm());
    EXPECT_NEAR(lattice_gap(P), best, 1e-9);
  }
}

TEST(LatticeGap, RescaleExceedsDimension) {
  Eigen::MatrixXd P = Eigen::MatrixXd::Identity(3, 3);
  Eigen::MatrixXd R = rescale_basis(P, 3);
  EXPECT_GT(lattice_gap(R), 3.0);
  EXPECT_DOUBLE_EQ(R(0, 0), 0.25);
}

TEST(Scc, MatchesReachabilityOracle) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    IntMatrix B = oracle::random_nonnegative(rng, 1 + trial % 7, 2, 0.3);
    std::vector<std::vector<int>> adj(B.size());
    for (int i = 0; i < B.size(); ++i)
      for (int j = 0; j < B.size(); ++j)
        if (B(i, j)) adj[i].push_back(j);
    auto got = strongly_connected_components(adj);
    for (auto& c : got) std::sort(c.begin(), c.end());
    std::sort(got.begin(), got.end());
    EXPECT_EQ(got, oracle::sccs(B));
  }
}

TEST(SpectralRadius, MatchesDenseSolver) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    IntMatrix B = oracle::random_nonnegative(rng, 1 + trial % 6, 3);
    EXPECT_NEAR(spectral_radius(B), oracle::spectral_radius(B), 1e-6);
  }
  EXPECT_NEAR(spectral_radius(IntMatrix{{1, 1}, {1, 0}}), (1 + std::sqrt(5.0)) / 2, 1e-12);
}

TEST(IntMatrixOps, OverflowIsReported) {
  IntMatrix M{{std::int64_t(1) << 40}};
  EXPECT_THROW(M.pow(2), Error);
}

TEST(IntMatrixOps, AdjugateIdentity) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 40; ++trial) {
    IntMatrix M = random_int(rng, 1 + trial % 4, 5);
    IntMatrix P = M * M.adjugate();
    for (int i = 0; i < M.size(); ++i)
      for (int j = 0; j < M.size(); ++j) EXPECT_EQ(P(i, j), i == j ? M.det() : 0);
  }
}
