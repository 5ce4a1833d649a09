#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "oracles.hpp"
#include "sadim/ifs.hpp"
#include "sadim/perturb.hpp"

using namespace sadim;

TEST(ComposeDigits, MultiIndexOrder) {
  IntMatrix T{{3}};
  std::vector<IntVec> A{{0}, {1}, {5}};
  auto D = compose_digits_indexed(T, A, 3);
  ASSERT_EQ(D.size(), 27u);
  for (int j1 = 0; j1 < 3; ++j1)
    for (int j2 = 0; j2 < 3; ++j2)
      for (int j3 = 0; j3 < 3; ++j3)
        EXPECT_EQ(D[j1 * 9 + j2 * 3 + j3][0], 9 * A[j1][0] + 3 * A[j2][0] + A[j3][0]);
}

TEST(ComposeDigits, DistinctCountsAndBudget) {
  IntMatrix T{{2, 0}, {0, 2}};
  std::vector<IntVec> A{{0, 0}, {1, 0}, {0, 1}, {1, 1}};
  EXPECT_EQ(compose_digits(T, A, 3).size(), 64u);
  std::vector<IntVec> B{{0}, {1}, {2}};
  // 0..3 + {0,2,4}: overlaps collapse
  EXPECT_EQ(compose_digits(IntMatrix{{2}}, B, 2).size(), 7u);
  EXPECT_THROW(compose_digits_indexed(T, A, 12, 1000), Error);
}

TEST(ComposeDigits, RealAndIntegerAgree) {
  IntMatrix T{{0, -2}, {1, 0}};
  std::vector<IntVec> A{{0, 0}, {1, 0}, {0, 1}};
  auto Di = compose_digits_indexed(T, A, 4);
  std::vector<Eigen::VectorXd> Ar;
  for (const auto& a : A) Ar.push_back(to_eigen(a));
  auto Dr = compose_digits_indexed(T.to_eigen(), Ar, 4);
  ASSERT_EQ(Di.size(), Dr.size());
  for (size_t i = 0; i < Di.size(); ++i) EXPECT_LT((to_eigen(Di[i]) - Dr[i]).norm(), 1e-12);
}

TEST(InverseNorms, ScalarGenerator) {
  auto nrm = inverse_power_norms(Eigen::MatrixXd::Identity(2, 2) * 2, 5);
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(nrm[i], std::sqrt(2.0) / std::pow(2, i + 1), 1e-15);
}

TEST(SeriesBound, DominatesPartialSums) {
  for (const IntMatrix& T : {IntMatrix{{2}}, IntMatrix{{0, -2}, {1, 0}}, IntMatrix{{2, 0}, {1, 2}},
                             IntMatrix{{1, -1}, {1, 1}}, IntMatrix{{2, 1}, {1, 3}}}) {
    Eigen::MatrixXd inv = T.to_eigen().inverse(), p = inv;
    double sum = 0;
    for (int i = 0; i < 3000; ++i) {
      sum += p.norm();
      p = p * inv;
    }
    double b = inverse_series_bound(T.to_eigen());
    EXPECT_GE(b, sum);
    EXPECT_LT(b, sum * 1.01);
  }
}

TEST(Diameter, BoundsCoverCloud) {
  for (const IntSystem& s : {IntSystem{IntMatrix{{2}}, {{0}, {1}}},
                             IntSystem{IntMatrix{{2, 0}, {0, 2}}, {{0, 0}, {1, 0}, {0, 1}}},
                             IntSystem{IntMatrix{{1, -1}, {1, 1}}, {{0, 0}, {1, 0}}},
                             IntSystem{IntMatrix{{0, -2}, {1, 0}}, {{0, 0}, {1, 0}}}}) {
    RealSystem rs = RealSystem::from(s);
    PointCloud c = attractor_points(rs, 7);
    double diam = 0, norm = 0;
    for (const auto& a : c.points) {
      norm = std::max(norm, a.norm());
      for (const auto& b : c.points) diam = std::max(diam, (a - b).norm());
    }
    EXPECT_GE(diam_upper_bound(rs), diam);
    EXPECT_GE(norm_upper_bound(rs), norm);
  }
  RealSystem unit = RealSystem::from(IntSystem{IntMatrix{{2}}, {{0}, {1}}});
  EXPECT_NEAR(diam_upper_bound(unit), 1.0, 1e-9);
}

TEST(AttractorCloud, ExhaustiveMatchesWordOracle) {
  IntMatrix T{{2, 0}, {0, 2}};
  std::vector<IntVec> A{{0, 0}, {1, 0}, {0, 1}};
  PointCloud c = attractor_points(RealSystem::from(IntSystem{T, A}), 5);
  EXPECT_FALSE(c.sampled);
  auto brute = oracle::level_points(T, A, 5);
  ASSERT_EQ(c.points.size(), brute.size());
  EXPECT_LT(hausdorff_distance(c.points, brute), 1e-12);
  EXPECT_TRUE(std::is_sorted(c.points.begin(), c.points.end(), [](const auto& a, const auto& b) {
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
  }));
  // truncation radius: |T^-5| * sup |x|
  EXPECT_NEAR(c.errorRadius, std::sqrt(2.0) / 32 * norm_upper_bound(RealSystem::from(IntSystem{T, A})), 1e-9);
}

TEST(AttractorCloud, SampledIsSeedDeterministic) {
  RealSystem rs = RealSystem::from(IntSystem{IntMatrix{{3}}, {{0}, {2}}});
  PointCloud a = attractor_points(rs, 30, 500, 42), b = attractor_points(rs, 30, 500, 42),
             c = attractor_points(rs, 30, 500, 43);
  EXPECT_TRUE(a.sampled);
  ASSERT_EQ(a.points.size(), 500u);
  for (size_t i = 0; i < a.points.size(); ++i) EXPECT_EQ(a.points[i], b.points[i]);
  bool differs = false;
  for (size_t i = 0; i < a.points.size(); ++i) differs = differs || a.points[i] != c.points[i];
  EXPECT_TRUE(differs);
  // ternary Cantor points never land in the open middle third
  for (const auto& p : a.points) EXPECT_FALSE(p[0] > 1.0 / 3 + 1e-12 && p[0] < 2.0 / 3 - 1e-12);
}

TEST(AttractorCloud, InvarianceResidualVanishesWhenExhaustive) {
  RealSystem rs = RealSystem::from(IntSystem{IntMatrix{{0, -2}, {1, 0}}, {{0, 0}, {1, 0}}});
  EXPECT_LT(invariance_residual(rs, 10), 1e-12);
  EXPECT_THROW(invariance_residual(rs, 1), Error);
}

TEST(AttractorCloud, CsvHasOneLinePerPoint) {
  PointCloud c = attractor_points(RealSystem::from(IntSystem{IntMatrix{{2}}, {{0}, {1}}}), 4);
  std::ostringstream os;
  write_csv(os, c);
  std::string s = os.str();
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 16);
}
