#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "sadim/common.hpp"

namespace sadim {

constexpr std::size_t kDefaultPointBudget = std::size_t(1) << 20;

struct PointCloud {
  std::vector<Eigen::VectorXd> points;  // sorted lexicographically
  int depth = 0;
  double errorRadius = 0;
  bool sampled = false;
  std::uint64_t seed = 0;
};

// Level-k digits indexed by multi-index (j_1 most significant), q^k entries.
std::vector<IntVec> compose_digits_indexed(const IntMatrix& T, const std::vector<IntVec>& A, int k,
                                           std::size_t budget = kDefaultPointBudget);
std::vector<Eigen::VectorXd> compose_digits_indexed(const Eigen::MatrixXd& T, const std::vector<Eigen::VectorXd>& A,
                                                    int k, std::size_t budget = kDefaultPointBudget);

// Distinct level-k digits, first-occurrence order.
std::vector<IntVec> compose_digits(const IntMatrix& T, const std::vector<IntVec>& A, int k,
                                   std::size_t budget = kDefaultPointBudget);

// Frobenius norms of T^{-1}, ..., T^{-L}.
std::vector<double> inverse_power_norms(const Eigen::MatrixXd& T, int L);

// Rigorous bound on sum_{i>=1} ||T^{-i}||, the series behind the diameter bound.
double inverse_series_bound(const Eigen::MatrixXd& T);

double diam_upper_bound(const RealSystem& sys);
double norm_upper_bound(const RealSystem& sys);  // sup |x| over F

PointCloud attractor_points(const RealSystem& sys, int depth, std::size_t budget = kDefaultPointBudget,
                            std::uint64_t seed = 0);

double invariance_residual(const RealSystem& sys, int depth, std::size_t budget = kDefaultPointBudget,
                           std::uint64_t seed = 0);

void write_csv(std::ostream& os, const PointCloud& cloud);

}  // namespace sadim
