#pragma once

// Brute-force reference implementations shared by the tests and the
// acceptance runner. Nothing here calls into the library's own algorithms.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include <Eigen/Dense>

#include "sadim/common.hpp"

namespace oracle {

using sadim::IntMatrix;
using sadim::IntVec;
using BoolMat = std::vector<std::vector<bool>>;

inline BoolMat support(const IntMatrix& B) {
  const int n = B.size();
  BoolMat m(n, std::vector<bool>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m[i][j] = B(i, j) > 0;
  return m;
}

inline BoolMat bool_mul(const BoolMat& a, const BoolMat& b) {
  const size_t n = a.size();
  BoolMat c(n, std::vector<bool>(n));
  for (size_t i = 0; i < n; ++i)
    for (size_t k = 0; k < n; ++k)
      if (a[i][k])
        for (size_t j = 0; j < n; ++j) c[i][j] = c[i][j] || b[k][j];
  return c;
}

// Warshall transitive closure: reach[i][j] iff a path of length >= 1 exists.
inline BoolMat reachability(const IntMatrix& B) {
  BoolMat r = support(B);
  const size_t n = r.size();
  for (size_t k = 0; k < n; ++k)
    for (size_t i = 0; i < n; ++i)
      if (r[i][k])
        for (size_t j = 0; j < n; ++j) r[i][j] = r[i][j] || r[k][j];
  return r;
}

// Components as sorted vertex lists, ordered by their smallest vertex.
inline std::vector<std::vector<int>> sccs(const IntMatrix& B) {
  const int n = B.size();
  BoolMat r = reachability(B);
  std::vector<int> comp(n, -1);
  std::vector<std::vector<int>> out;
  for (int i = 0; i < n; ++i) {
    if (comp[i] >= 0) continue;
    std::vector<int> c{i};
    comp[i] = static_cast<int>(out.size());
    for (int j = i + 1; j < n; ++j)
      if (r[i][j] && r[j][i]) {
        comp[j] = comp[i];
        c.push_back(j);
      }
    out.push_back(c);
  }
  return out;
}

inline IntMatrix restrict(const IntMatrix& B, const std::vector<int>& vs) {
  IntMatrix R(static_cast<int>(vs.size()));
  for (size_t i = 0; i < vs.size(); ++i)
    for (size_t j = 0; j < vs.size(); ++j) R(int(i), int(j)) = B(vs[i], vs[j]);
  return R;
}

// gcd of cycle lengths inside the component; every simple cycle has length at
// most |C| and shows up on the diagonal of a power. 0 when there is no cycle.
inline int period(const IntMatrix& B, const std::vector<int>& comp) {
  BoolMat s = support(restrict(B, comp)), p = s;
  int g = 0;
  for (size_t L = 1; L <= comp.size(); ++L) {
    for (size_t v = 0; v < comp.size(); ++v)
      if (p[v][v]) g = std::gcd(g, static_cast<int>(L));
    p = bool_mul(p, s);
  }
  return g;
}

// Some power entrywise positive; Wielandt's exponent bound suffices.
inline bool primitive(const IntMatrix& B) {
  const int n = B.size();
  BoolMat s = support(B), p = s;
  const int limit = (n - 1) * (n - 1) + 1;
  for (int k = 1; k <= limit; ++k) {
    bool all = true;
    for (int i = 0; i < n && all; ++i)
      for (int j = 0; j < n && all; ++j) all = p[i][j];
    if (all) return true;
    p = bool_mul(p, s);
  }
  return false;
}

inline double spectral_radius(const IntMatrix& B) {
  if (B.size() == 0) return 0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(B.to_eigen(), false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

inline IntMatrix random_nonnegative(std::mt19937_64& rng, int n, int maxEntry, double density = 0.4) {
  std::uniform_real_distribution<double> coin(0, 1);
  std::uniform_int_distribution<int> val(1, maxEntry);
  IntMatrix B(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) B(i, j) = coin(rng) < density ? val(rng) : 0;
  return B;
}

// Distinct half-open mesh cells of the given side hit by a finite cloud.
inline std::size_t occupied_cells(const std::vector<Eigen::VectorXd>& pts, double side) {
  std::set<std::vector<long long>> cells;
  for (const auto& p : pts) {
    std::vector<long long> c(p.size());
    for (int i = 0; i < p.size(); ++i) c[i] = static_cast<long long>(std::floor(p[i] / side));
    cells.insert(c);
  }
  return cells.size();
}

// Words of length len over digit indices; the attractor point with address w
// followed by the zero digit forever is sum_i T^{-i} a_{w_i}.
inline std::vector<Eigen::VectorXd> level_points(const IntMatrix& T, const std::vector<IntVec>& A, int len) {
  const int n = T.size();
  Eigen::MatrixXd Ti = T.to_eigen().inverse();
  std::vector<Eigen::VectorXd> pts{Eigen::VectorXd::Zero(n)};
  Eigen::MatrixXd P = Ti;
  for (int l = 0; l < len; ++l) {
    std::vector<Eigen::VectorXd> next;
    for (const auto& p : pts)
      for (const auto& a : A) next.push_back(p + P * sadim::to_eigen(a));
    pts.swap(next);
    P = P * Ti;
  }
  return pts;
}

}  // namespace oracle
