#include "sadim/ifs.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>

#include "sadim/perturb.hpp"

namespace sadim {

namespace {

void check_budget(std::size_t q, int k, std::size_t budget) {
  double total = std::pow(static_cast<double>(q), k);
  if (total > static_cast<double>(budget))
    throw Error(ErrorKind::SizeLimit, "q^k = " + std::to_string(total) + " exceeds budget " + std::to_string(budget));
}

bool lex_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

}  // namespace

std::vector<IntVec> compose_digits_indexed(const IntMatrix& T, const std::vector<IntVec>& A, int k,
                                           std::size_t budget) {
  if (k < 1) throw Error(ErrorKind::InvalidInput, "k must be >= 1");
  check_budget(A.size(), k, budget);
  std::vector<IntVec> cur = A;
  for (int level = 2; level <= k; ++level) {
    std::vector<IntVec> next;
    next.reserve(cur.size() * A.size());
    for (const auto& c : cur) {
      IntVec tc = T.apply(c);
      for (const auto& a : A) next.push_back(tc + a);
    }
    cur.swap(next);
  }
  return cur;
}

std::vector<Eigen::VectorXd> compose_digits_indexed(const Eigen::MatrixXd& T, const std::vector<Eigen::VectorXd>& A,
                                                    int k, std::size_t budget) {
  if (k < 1) throw Error(ErrorKind::InvalidInput, "k must be >= 1");
  check_budget(A.size(), k, budget);
  std::vector<Eigen::VectorXd> cur = A;
  for (int level = 2; level <= k; ++level) {
    std::vector<Eigen::VectorXd> next;
    next.reserve(cur.size() * A.size());
    for (const auto& c : cur) {
      Eigen::VectorXd tc = T * c;
      for (const auto& a : A) next.push_back(tc + a);
    }
    cur.swap(next);
  }
  return cur;
}

std::vector<IntVec> compose_digits(const IntMatrix& T, const std::vector<IntVec>& A, int k, std::size_t budget) {
  return distinct(compose_digits_indexed(T, A, k, budget));
}

std::vector<double> inverse_power_norms(const Eigen::MatrixXd& T, int L) {
  Eigen::MatrixXd inv = T.inverse();
  Eigen::MatrixXd p = Eigen::MatrixXd::Identity(T.rows(), T.cols());
  std::vector<double> out;
  for (int i = 1; i <= L; ++i) {
    p = inv * p;
    out.push_back(p.norm());
  }
  return out;
}

double inverse_series_bound(const Eigen::MatrixXd& T) {
  const int L = 400;
  auto norms = inverse_power_norms(T, 2 * L);
  int M = -1;
  for (int i = 0; i < L; ++i)
    if (norms[i] < 0.5) {
      M = i + 1;
      break;
    }
  if (M < 0) throw Error(ErrorKind::NotExpanding, "inverse powers do not contract within 400 steps");
  double head = 0;
  for (int i = 0; i < L; ++i) head += norms[i];
  double tail = 0;
  for (int j = 1; j <= M; ++j) tail += norms[L + j - 1];
  tail /= (1 - norms[M - 1]);
  return (head + tail) * (1 + 1e-12);
}

double diam_upper_bound(const RealSystem& sys) {
  double spread = 0;
  for (const auto& a : sys.A)
    for (const auto& b : sys.A) spread = std::max(spread, (a - b).norm());
  if (spread == 0) return 0;
  return inverse_series_bound(sys.T) * spread;
}

double norm_upper_bound(const RealSystem& sys) {
  double mx = 0;
  for (const auto& a : sys.A) mx = std::max(mx, a.norm());
  if (mx == 0) return 0;
  return inverse_series_bound(sys.T) * mx;
}

PointCloud attractor_points(const RealSystem& sys, int depth, std::size_t budget, std::uint64_t seed) {
  if (depth < 1) throw Error(ErrorKind::InvalidInput, "depth must be >= 1");
  if (sys.A.empty()) throw Error(ErrorKind::InvalidInput, "empty digit set");
  const Eigen::MatrixXd inv = sys.T.inverse();
  const int n = sys.dim();
  PointCloud cloud;
  cloud.depth = depth;
  cloud.seed = seed;
  double total = std::pow(static_cast<double>(sys.A.size()), depth);
  if (total <= static_cast<double>(budget)) {
    std::vector<Eigen::VectorXd> pts{Eigen::VectorXd::Zero(n)};
    for (int d = 0; d < depth; ++d) {
      std::vector<Eigen::VectorXd> next;
      next.reserve(pts.size() * sys.A.size());
      for (const auto& a : sys.A)
        for (const auto& p : pts) next.push_back(inv * (a + p));
      pts.swap(next);
    }
    cloud.points = std::move(pts);
  } else {
    cloud.sampled = true;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, sys.A.size() - 1);
    cloud.points.reserve(budget);
    std::vector<std::size_t> idx(depth);
    for (std::size_t s = 0; s < budget; ++s) {
      for (int d = 0; d < depth; ++d) idx[d] = pick(rng);
      Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
      for (int d = depth - 1; d >= 0; --d) p = inv * (sys.A[idx[d]] + p);
      cloud.points.push_back(std::move(p));
    }
  }
  std::sort(cloud.points.begin(), cloud.points.end(), lex_less);
  cloud.errorRadius = inverse_power_norms(sys.T, depth).back() * norm_upper_bound(sys) * (1 + 1e-12);
  return cloud;
}

double invariance_residual(const RealSystem& sys, int depth, std::size_t budget, std::uint64_t seed) {
  if (depth < 2) throw Error(ErrorKind::InvalidInput, "depth must be >= 2");
  PointCloud a = attractor_points(sys, depth, budget, seed);
  PointCloud b = attractor_points(sys, depth - 1, budget, seed);
  const Eigen::MatrixXd inv = sys.T.inverse();
  PointCloud img;
  img.depth = depth;
  for (const auto& d : sys.A)
    for (const auto& p : b.points) img.points.push_back(inv * (p + d));
  return hausdorff_distance(a, img);
}

void write_csv(std::ostream& os, const PointCloud& cloud) {
  char buf[64];
  for (const auto& p : cloud.points) {
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", p[i]);
      if (i) os << ',';
      os << buf;
    }
    os << '\n';
  }
}

}  // namespace sadim
