#include "sadim/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/multiprecision/cpp_int.hpp>

namespace sadim {

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

namespace {

using RatPoly = std::vector<cpp_rational>;  // ascending
using cld = std::complex<long double>;

void trim(RatPoly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

int deg(const RatPoly& p) { return static_cast<int>(p.size()) - 1; }

RatPoly make_monic(RatPoly p) {
  trim(p);
  if (p.empty()) return p;
  cpp_rational lead = p.back();
  for (auto& c : p) c /= lead;
  return p;
}

RatPoly derivative(const RatPoly& p) {
  RatPoly d;
  for (size_t i = 1; i < p.size(); ++i) d.push_back(p[i] * static_cast<int>(i));
  trim(d);
  return d;
}

void divmod(RatPoly a, const RatPoly& b, RatPoly& q, RatPoly& r) {
  trim(a);
  q.assign(std::max(0, deg(a) - deg(b) + 1), cpp_rational(0));
  while (!a.empty() && deg(a) >= deg(b)) {
    int shift = deg(a) - deg(b);
    cpp_rational f = a.back() / b.back();
    q[shift] = f;
    for (size_t i = 0; i < b.size(); ++i) a[i + shift] -= f * b[i];
    a.pop_back();
    trim(a);
  }
  r = a;
}

RatPoly quotient(const RatPoly& a, const RatPoly& b) {
  RatPoly q, r;
  divmod(a, b, q, r);
  return q;
}

RatPoly poly_gcd(RatPoly a, RatPoly b) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    RatPoly q, r;
    divmod(a, b, q, r);
    a = b;
    b = r;
  }
  return make_monic(a);
}

// Square-free decomposition f = prod g_i^i.
std::vector<std::pair<RatPoly, int>> squarefree(const RatPoly& f) {
  std::vector<std::pair<RatPoly, int>> out;
  RatPoly c = poly_gcd(f, derivative(f));
  RatPoly w = quotient(f, c);
  int i = 1;
  while (deg(w) > 0) {
    RatPoly y = poly_gcd(w, c);
    RatPoly z = quotient(w, y);
    if (deg(z) > 0) out.push_back({make_monic(z), i});
    ++i;
    w = y;
    c = quotient(c, y);
  }
  return out;
}

cpp_rational eval_exact(const RatPoly& p, const cpp_rational& x) {
  cpp_rational r = 0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) r = r * x + *it;
  return r;
}

bool is_gaussian_root(const RatPoly& p, std::int64_t a, std::int64_t b) {
  cpp_rational re = 0, im = 0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) {
    cpp_rational nre = re * a - im * b + *it;
    cpp_rational nim = re * b + im * a;
    re = nre;
    im = nim;
  }
  return re == 0 && im == 0;
}

long double to_ld(const cpp_rational& q) { return static_cast<long double>(q); }

cld horner(const std::vector<long double>& c, cld z, cld* dz) {
  cld p = 0, d = 0;
  for (int i = static_cast<int>(c.size()) - 1; i >= 0; --i) {
    d = d * z + p;
    p = p * z + c[i];
  }
  if (dz) *dz = d;
  return p;
}

std::vector<cld> aberth(const RatPoly& g) {
  const int d = deg(g);
  std::vector<long double> c(g.size());
  for (size_t i = 0; i < g.size(); ++i) c[i] = to_ld(g[i]);
  long double bound = 0;
  for (int i = 0; i < d; ++i) bound = std::max(bound, std::fabs(c[i]));
  long double r = std::pow(std::fabs(c[0]) + 1e-30L, 1.0L / d);
  r = std::min(std::max(r, 0.5L), 1 + bound);
  std::vector<cld> z(d);
  const long double pi = 3.14159265358979323846264338327950288L;
  for (int k = 0; k < d; ++k) z[k] = std::polar(r, 2 * pi * k / d + 0.4L);
  bool converged = false;
  for (int it = 0; it < 2000 && !converged; ++it) {
    long double worst = 0;
    for (int k = 0; k < d; ++k) {
      cld dp;
      cld p = horner(c, z[k], &dp);
      if (std::abs(p) == 0) continue;
      cld ratio = p / dp;
      cld s = 0;
      for (int j = 0; j < d; ++j)
        if (j != k) s += 1.0L / (z[k] - z[j]);
      cld w = ratio / (1.0L - ratio * s);
      z[k] -= w;
      worst = std::max(worst, std::abs(w) / std::max(1.0L, std::abs(z[k])));
    }
    converged = worst < 1e-17L;
  }
  if (!converged) {
    for (int k = 0; k < d; ++k) {
      cld dp;
      cld p = horner(c, z[k], &dp);
      if (std::abs(p / dp) > 1e-12L * std::max(1.0L, std::abs(z[k])))
        throw Error(ErrorKind::NonConvergence, "polynomial root iteration did not converge");
    }
  }
  for (int k = 0; k < d; ++k)
    for (int it = 0; it < 3; ++it) {
      cld dp;
      cld p = horner(c, z[k], &dp);
      if (std::abs(dp) == 0) break;
      z[k] -= p / dp;
    }
  return z;
}

std::vector<cld> factor_roots(const RatPoly& g, double tol) {
  const int d = deg(g);
  std::vector<cld> z;
  if (d == 1) {
    z.push_back(to_ld(-g[0] / g[1]));
  } else if (d == 2) {
    cpp_rational b = g[1], c = g[0];  // monic
    cpp_rational disc = b * b - 4 * c;
    long double re = to_ld(-b / 2);
    if (disc >= 0) {
      long double s = std::sqrt(to_ld(disc));
      long double q = -0.5L * (to_ld(b) + (b >= 0 ? s : -s));
      long double r1 = q, r2 = (q != 0) ? to_ld(c) / q : 0;
      z.push_back(r1);
      z.push_back(r2);
    } else {
      long double im = std::sqrt(to_ld(-disc)) / 2;
      z.push_back(cld(re, im));
      z.push_back(cld(re, -im));
    }
  } else {
    z = aberth(g);
    for (auto& x : z)
      if (std::fabs(x.imag()) <= tol * std::max(1.0L, std::abs(x))) x = x.real();
    // enforce exact conjugate pairs
    std::vector<bool> used(z.size(), false);
    for (size_t i = 0; i < z.size(); ++i) {
      if (used[i] || z[i].imag() <= 0) continue;
      size_t best = i;
      long double bd = std::numeric_limits<long double>::max();
      for (size_t j = 0; j < z.size(); ++j) {
        if (used[j] || j == i || z[j].imag() >= 0) continue;
        long double dd = std::abs(z[j] - std::conj(z[i]));
        if (dd < bd) bd = dd, best = j;
      }
      if (best == i) throw Error(ErrorKind::NonConvergence, "unpaired complex root");
      cld avg = (z[i] + std::conj(z[best])) / 2.0L;
      z[i] = avg;
      z[best] = std::conj(avg);
      used[i] = used[best] = true;
    }
  }
  for (auto& x : z) {
    long double ra = std::round(x.real()), ia = std::round(x.imag());
    long double scale = std::max(1.0L, std::abs(x));
    if (std::fabs(x.real() - ra) <= 1e-9L * scale && std::fabs(x.imag() - ia) <= 1e-9L * scale) {
      if (ia == 0 && eval_exact(g, cpp_rational(static_cast<std::int64_t>(ra))) == 0)
        x = ra;
      else if (ia != 0 && is_gaussian_root(g, static_cast<std::int64_t>(ra), static_cast<std::int64_t>(ia)))
        x = cld(ra, ia);
    }
  }
  return z;
}

bool root_less(const EigenRoot& a, const EigenRoot& b) {
  double ma = std::abs(a.value), mb = std::abs(b.value);
  if (ma != mb) return ma < mb;
  if (a.value.real() != b.value.real()) return a.value.real() < b.value.real();
  return a.value.imag() < b.value.imag();
}

}  // namespace

Polynomial char_poly(const IntMatrix& M) {
  const int n = M.size();
  using Mat = std::vector<std::vector<cpp_int>>;
  Mat A(n, std::vector<cpp_int>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A[i][j] = M(i, j);
  std::vector<cpp_int> c(n + 1);
  c[n] = 1;
  Mat Mk(n, std::vector<cpp_int>(n, 0));
  for (int k = 1; k <= n; ++k) {
    Mat next(n, std::vector<cpp_int>(n, 0));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        cpp_int s = 0;
        for (int l = 0; l < n; ++l) s += A[i][l] * Mk[l][j];
        next[i][j] = s;
      }
    for (int i = 0; i < n; ++i) next[i][i] += c[n - k + 1];
    Mk = next;
    cpp_int tr = 0;
    for (int i = 0; i < n; ++i)
      for (int l = 0; l < n; ++l) tr += A[i][l] * Mk[l][i];
    c[n - k] = -tr / k;
  }
  Polynomial p;
  for (const auto& v : c) {
    if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min())
      throw Error(ErrorKind::SizeLimit, "characteristic polynomial coefficient overflow");
    p.coeffs.push_back(static_cast<std::int64_t>(v));
  }
  return p;
}

bool annihilates(const Polynomial& p, const IntMatrix& M) {
  const int n = M.size();
  using Mat = std::vector<std::vector<cpp_int>>;
  Mat R(n, std::vector<cpp_int>(n, 0));
  for (int d = p.degree(); d >= 0; --d) {
    Mat next(n, std::vector<cpp_int>(n, 0));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        cpp_int s = 0;
        for (int l = 0; l < n; ++l) s += R[i][l] * M(l, j);
        next[i][j] = s;
      }
    for (int i = 0; i < n; ++i) next[i][i] += p.coeffs[d];
    R = next;
  }
  for (const auto& row : R)
    for (const auto& v : row)
      if (v != 0) return false;
  return true;
}

ComplexSpectrum poly_roots(const Polynomial& p, double tol) {
  RatPoly f;
  for (auto c : p.coeffs) f.push_back(cpp_rational(c));
  trim(f);
  ComplexSpectrum spec;
  spec.tolerance = tol;
  std::vector<EigenRoot> raw;
  for (const auto& [g, mult] : squarefree(f))
    for (const auto& z : factor_roots(g, tol))
      raw.push_back({std::complex<double>(static_cast<double>(z.real()), static_cast<double>(z.imag())), mult});
  // cluster
  std::vector<bool> taken(raw.size(), false);
  for (size_t i = 0; i < raw.size(); ++i) {
    if (taken[i]) continue;
    EigenRoot r = raw[i];
    std::complex<double> sum = r.value * static_cast<double>(r.multiplicity);
    for (size_t j = i + 1; j < raw.size(); ++j) {
      if (taken[j]) continue;
      double scale = std::max(1.0, std::abs(r.value));
      if (std::abs(raw[j].value - r.value) <= tol * scale) {
        taken[j] = true;
        sum += raw[j].value * static_cast<double>(raw[j].multiplicity);
        r.multiplicity += raw[j].multiplicity;
      }
    }
    if (r.multiplicity != raw[i].multiplicity) r.value = sum / static_cast<double>(r.multiplicity);
    spec.roots.push_back(r);
  }
  std::sort(spec.roots.begin(), spec.roots.end(), root_less);
  return spec;
}

ComplexSpectrum eigenvalues(const IntMatrix& M, double tol) { return poly_roots(char_poly(M), tol); }

bool is_expanding(const IntMatrix& M, double tol) {
  auto spec = eigenvalues(M, std::min(tol, 1e-9));
  bool expanding = true;
  for (const auto& r : spec.roots) {
    double m = std::abs(r.value);
    if (m >= 1 - tol && m <= 1 + tol)
      throw Error(ErrorKind::Indeterminate, "eigenvalue modulus " + std::to_string(m) + " is within tolerance of 1");
    if (m < 1) expanding = false;
  }
  return expanding;
}

namespace {

template <class S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <class S>
using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;

template <class S>
int numeric_rank(const Mat<S>& A, double thresh) {
  if (A.cols() == 0) return 0;
  Eigen::JacobiSVD<Mat<S>> svd(A);
  int r = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > thresh) ++r;
  return r;
}

template <class S>
Mat<S> hcat(const Mat<S>& a, const Mat<S>& b) {
  Mat<S> r(a.rows() > 0 ? a.rows() : b.rows(), a.cols() + b.cols());
  if (a.cols()) r.leftCols(a.cols()) = a;
  if (b.cols()) r.rightCols(b.cols()) = b;
  return r;
}

template <class S>
Vec<S> normalize_phase(Vec<S> v) {
  v /= v.norm();
  Eigen::Index idx = 0;
  double best = -1;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (std::abs(v(i)) > best + 1e-12) best = std::abs(v(i)), idx = i;
  S ph = v(idx) / std::abs(v(idx));
  if constexpr (std::is_same_v<S, double>)
    v *= ph;
  else
    v *= std::conj(ph);
  return v;
}

// Chains (v, Nv, ..., N^{len-1}v) spanning ker N^m, longest first.
template <class S>
std::vector<std::vector<Vec<S>>> jordan_chains(const Mat<S>& N, int m, double rankTol) {
  const int n = static_cast<int>(N.rows());
  Eigen::JacobiSVD<Mat<S>> s0(N);
  const double nrm = std::max(1.0, s0.singularValues()(0));
  std::vector<Mat<S>> K(m + 2, Mat<S>(n, 0));
  std::vector<int> dimK(m + 2, m);
  dimK[0] = 0;
  Mat<S> Np = Mat<S>::Identity(n, n);
  int jmax = -1;
  for (int j = 1; j <= m; ++j) {
    Np = N * Np;
    Eigen::JacobiSVD<Mat<S>> svd(Np, Eigen::ComputeFullV);
    const double scale = std::pow(nrm, j);
    int zero = 0;
    for (int i = 0; i < n; ++i) {
      double sv = svd.singularValues()(i);
      if (sv <= rankTol * scale)
        ++zero;
      else if (sv < std::sqrt(rankTol) * scale)
        throw Error(ErrorKind::IllConditioned,
                    "ambiguous rank decision (singular value " + std::to_string(sv / scale) + " relative)");
    }
    K[j] = svd.matrixV().rightCols(zero);
    dimK[j] = zero;
    if (zero > m || zero < dimK[j - 1])
      throw Error(ErrorKind::IllConditioned, "inconsistent generalized eigenspace dimensions");
    if (zero == m) {
      jmax = j;
      break;
    }
  }
  if (jmax < 0) throw Error(ErrorKind::IllConditioned, "generalized eigenspace smaller than multiplicity");
  const double indep = std::sqrt(rankTol);
  std::vector<std::vector<Vec<S>>> chains;
  Mat<S> chosen(n, 0);
  for (int j = jmax; j >= 1; --j) {
    int need = 2 * dimK[j] - dimK[j - 1] - dimK[j + 1];
    if (need <= 0) continue;
    for (int c = 0; c < K[j].cols() && need > 0; ++c) {
      Mat<S> base = hcat<S>(K[j - 1], chosen);
      Vec<S> v = K[j].col(c);
      Mat<S> ext = hcat<S>(base, Mat<S>(v));
      if (numeric_rank<S>(ext, indep) <= numeric_rank<S>(base, indep)) continue;
      v = normalize_phase<S>(v);
      std::vector<Vec<S>> chain;
      Vec<S> w = v;
      for (int t = 0; t < j; ++t) {
        chain.push_back(w);
        w = N * w;
      }
      Mat<S> add(n, j);
      for (int t = 0; t < j; ++t) add.col(t) = chain[t] / chain[t].norm();
      chosen = hcat<S>(chosen, add);
      chains.push_back(std::move(chain));
      --need;
    }
    if (need > 0) throw Error(ErrorKind::IllConditioned, "could not complete Jordan chains");
  }
  return chains;
}

}  // namespace

double lattice_gap(const Eigen::MatrixXd& P) {
  const int n = static_cast<int>(P.rows());
  Eigen::MatrixXd Q = P.inverse();
  Eigen::MatrixXd G = Q.transpose() * Q;
  Eigen::LLT<Eigen::MatrixXd> llt(G);
  Eigen::MatrixXd R = llt.matrixU();
  double best = std::numeric_limits<double>::max();
  for (int i = 0; i < n; ++i) best = std::min(best, G(i, i));
  // Fincke-Pohst enumeration of z != 0 with z^T G z < best.
  std::vector<double> z(n, 0);
  std::function<void(int, double)> rec = [&](int i, double used) {
    double c = 0;
    for (int j = i + 1; j < n; ++j) c -= R(i, j) / R(i, i) * z[j];
    double room = best * (1 + 1e-12) - used;
    if (room < 0) return;
    double half = std::sqrt(room) / R(i, i);
    long lo = static_cast<long>(std::ceil(c - half)), hi = static_cast<long>(std::floor(c + half));
    for (long v = lo; v <= hi; ++v) {
      z[i] = static_cast<double>(v);
      double t = R(i, i) * (z[i] - c);
      double u = used + t * t;
      if (i == 0) {
        bool nonzero = std::any_of(z.begin(), z.end(), [](double x) { return x != 0; });
        if (nonzero && u < best) best = u;
      } else {
        rec(i - 1, u);
      }
    }
    z[i] = 0;
  };
  rec(n - 1, 0.0);
  return std::sqrt(best);
}

Eigen::MatrixXd rescale_basis(const Eigen::MatrixXd& P, int n) {
  double gap = lattice_gap(P);
  if (gap > n) return P;
  double c = 1;
  while (gap / c <= n) c /= 2;
  return c * P;
}

JordanData real_jordan_form(const IntMatrix& M, const JordanOptions& opt) {
  const int n = M.size();
  auto spec = eigenvalues(M, opt.clusterTol);
  for (const auto& r : spec.roots)
    if (std::abs(r.value) <= 1)
      throw Error(ErrorKind::NotExpanding, "eigenvalue modulus " + std::to_string(std::abs(r.value)) + " <= 1");
  const Eigen::MatrixXd Md = M.to_eigen();
  struct Pending {
    JordanBlock block;
    std::vector<Eigen::VectorXd> real;
    std::vector<Eigen::VectorXcd> cplx;
  };
  std::vector<Pending> pend;
  for (const auto& r : spec.roots) {
    if (r.value.imag() < 0) continue;
    if (r.value.imag() == 0) {
      Eigen::MatrixXd N = Md - r.value.real() * Eigen::MatrixXd::Identity(n, n);
      for (auto& ch : jordan_chains<double>(N, r.multiplicity, opt.rankTol)) {
        Pending p;
        p.block = {r.value, std::abs(r.value), static_cast<int>(ch.size()), false, 0};
        p.real = ch;
        pend.push_back(std::move(p));
      }
    } else {
      Eigen::MatrixXcd N = Md.cast<std::complex<double>>() - r.value * Eigen::MatrixXcd::Identity(n, n);
      for (auto& ch : jordan_chains<std::complex<double>>(N, r.multiplicity, opt.rankTol)) {
        Pending p;
        p.block = {r.value, std::abs(r.value), static_cast<int>(ch.size()), true, 0};
        p.cplx = ch;
        pend.push_back(std::move(p));
      }
    }
  }
  std::stable_sort(pend.begin(), pend.end(), [](const Pending& a, const Pending& b) {
    if (a.block.modulus != b.block.modulus) return a.block.modulus < b.block.modulus;
    if (a.block.eigenvalue.real() != b.block.eigenvalue.real())
      return a.block.eigenvalue.real() < b.block.eigenvalue.real();
    if (a.block.eigenvalue.imag() != b.block.eigenvalue.imag())
      return a.block.eigenvalue.imag() < b.block.eigenvalue.imag();
    return a.block.size > b.block.size;
  });
  JordanData jd;
  jd.J = Eigen::MatrixXd::Zero(n, n);
  jd.P = Eigen::MatrixXd::Zero(n, n);
  int off = 0;
  for (auto& p : pend) {
    p.block.offset = off;
    const double a = p.block.eigenvalue.real(), b = p.block.eigenvalue.imag();
    if (!p.block.complex) {
      for (int i = 0; i < p.block.size; ++i) {
        jd.J(off + i, off + i) = a;
        if (i + 1 < p.block.size) jd.J(off + i + 1, off + i) = 1;
        jd.P.col(off + i) = p.real[i];
      }
    } else {
      for (int i = 0; i < p.block.size; ++i) {
        int o = off + 2 * i;
        jd.J(o, o) = a;
        jd.J(o, o + 1) = -b;
        jd.J(o + 1, o) = b;
        jd.J(o + 1, o + 1) = a;
        if (i + 1 < p.block.size) {
          jd.J(o + 2, o) = 1;
          jd.J(o + 3, o + 1) = 1;
        }
        jd.P.col(o) = p.cplx[i].real();
        jd.P.col(o + 1) = -p.cplx[i].imag();
      }
    }
    off += p.block.dim();
    jd.blocks.push_back(p.block);
  }
  if (off != n) throw Error(ErrorKind::IllConditioned, "Jordan blocks do not fill the space");
  Eigen::FullPivLU<Eigen::MatrixXd> lu(jd.P);
  if (!lu.isInvertible()) throw Error(ErrorKind::IllConditioned, "conjugating basis is singular");
  jd.residual = (jd.P * jd.J * lu.inverse() - Md).norm();
  if (jd.residual > opt.rankTol * std::max(1.0, Md.norm())) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(jd.P);
    double cond = svd.singularValues()(0) / svd.singularValues()(n - 1);
    throw Error(ErrorKind::IllConditioned,
                "Jordan residual " + std::to_string(jd.residual) + ", condition estimate " + std::to_string(cond));
  }
  jd.P = rescale_basis(jd.P, n);
  jd.latticeGap = lattice_gap(jd.P);
  return jd;
}

std::vector<std::vector<int>> strongly_connected_components(const std::vector<std::vector<int>>& adj) {
  const int n = static_cast<int>(adj.size());
  std::vector<int> index(n, -1), low(n, 0);
  std::vector<char> on(n, 0);
  std::vector<int> stack;
  std::vector<std::vector<int>> comps;
  int counter = 0;
  std::vector<std::pair<int, size_t>> work;
  for (int s = 0; s < n; ++s) {
    if (index[s] >= 0) continue;
    work.push_back({s, 0});
    index[s] = low[s] = counter++;
    stack.push_back(s);
    on[s] = 1;
    while (!work.empty()) {
      auto& [v, it] = work.back();
      if (it < adj[v].size()) {
        int w = adj[v][it++];
        if (index[w] < 0) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on[w] = 1;
          work.push_back({w, 0});
        } else if (on[w]) {
          low[v] = std::min(low[v], index[w]);
        }
      } else {
        int vv = v;
        work.pop_back();
        if (!work.empty()) low[work.back().first] = std::min(low[work.back().first], low[vv]);
        if (low[vv] == index[vv]) {
          std::vector<int> comp;
          int w;
          do {
            w = stack.back();
            stack.pop_back();
            on[w] = 0;
            comp.push_back(w);
          } while (w != vv);
          std::sort(comp.begin(), comp.end());
          comps.push_back(std::move(comp));
        }
      }
    }
  }
  return comps;
}

namespace {

cpp_int exact_det(const IntMatrix& B, const std::vector<int>& verts, std::int64_t shift) {
  const int n = static_cast<int>(verts.size());
  std::vector<std::vector<cpp_int>> m(n, std::vector<cpp_int>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m[i][j] = B(verts[i], verts[j]) - (i == j ? shift : 0);
  cpp_int sign = 1, prev = 1;
  for (int k = 0; k < n - 1; ++k) {
    if (m[k][k] == 0) {
      int p = k + 1;
      while (p < n && m[p][k] == 0) ++p;
      if (p == n) return 0;
      std::swap(m[k], m[p]);
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i)
      for (int j = k + 1; j < n; ++j) m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
    prev = m[k][k];
  }
  return sign * m[n - 1][n - 1];
}

double perron_irreducible(const IntMatrix& B, const std::vector<int>& verts, double tol) {
  const int n = static_cast<int>(verts.size());
  std::vector<std::vector<std::pair<int, double>>> rows(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      auto v = B(verts[i], verts[j]);
      if (v) rows[i].push_back({j, static_cast<double>(v)});
    }
  std::vector<double> x(n, 1.0), y(n);
  double lo = 0, hi = 0;
  bool ok = false;
  for (int it = 0; it < 200000; ++it) {
    double mx = 0;
    lo = std::numeric_limits<double>::max();
    hi = 0;
    for (int i = 0; i < n; ++i) {
      double s = x[i];
      for (auto [j, w] : rows[i]) s += w * x[j];
      y[i] = s;
      lo = std::min(lo, s / x[i]);
      hi = std::max(hi, s / x[i]);
      mx = std::max(mx, s);
    }
    for (int i = 0; i < n; ++i) x[i] = y[i] / mx;
    if (hi - lo <= tol * hi) {
      ok = true;
      break;
    }
  }
  double rho = 0.5 * (lo + hi) - 1;
  if (!ok) {
    if (n > 3000) throw Error(ErrorKind::NonConvergence, "power iteration did not converge");
    Eigen::MatrixXd D(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) D(i, j) = static_cast<double>(B(verts[i], verts[j]));
    Eigen::EigenSolver<Eigen::MatrixXd> es(D, false);
    double best = 0;
    for (int i = 0; i < n; ++i) best = std::max(best, std::abs(es.eigenvalues()(i)));
    if (best < lo - 1 - 1e-9 * hi || best > hi - 1 + 1e-9 * hi)
      throw Error(ErrorKind::NonConvergence, "power iteration did not converge");
    rho = best;
  }
  double c = std::round(rho);
  if (c > 0 && std::fabs(rho - c) <= 1e-9 * std::max(1.0, rho) && n <= 64 &&
      exact_det(B, verts, static_cast<std::int64_t>(c)) == 0)
    rho = c;
  return rho;
}

}  // namespace

double spectral_radius(const IntMatrix& B, double tol) {
  if (!B.is_nonnegative()) throw Error(ErrorKind::InvalidInput, "spectral_radius needs a nonnegative matrix");
  const int n = B.size();
  std::vector<std::vector<int>> adj(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (B(i, j) > 0) adj[i].push_back(j);
  double best = 0;
  for (const auto& comp : strongly_connected_components(adj)) {
    if (comp.size() == 1 && B(comp[0], comp[0]) == 0) continue;
    best = std::max(best, perron_irreducible(B, comp, tol));
  }
  if (n <= 8) {
    auto spec = eigenvalues(B, 1e-9);
    double mm = 0;
    for (const auto& r : spec.roots) mm = std::max(mm, std::abs(r.value));
    if (std::fabs(mm - best) > 1e-6 * std::max(1.0, best))
      throw Error(ErrorKind::NonConvergence, "spectral radius cross-check failed");
  }
  return best;
}

}  // namespace sadim
