#include "sadim/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

namespace sadim {

const char* to_string(Variant v) { return v == Variant::Lower ? "lower" : "upper"; }

bool near_integer(double x, double snapTol) {
  return std::fabs(x - std::round(x)) <= snapTol * std::max(1.0, std::fabs(x));
}

std::int64_t signed_ceil(double x, double snapTol) {
  if (near_integer(x, snapTol)) return static_cast<std::int64_t>(std::round(x));
  return static_cast<std::int64_t>(x >= 0 ? std::ceil(x) : -std::ceil(-x));
}

std::int64_t signed_floor(double x, double snapTol) {
  if (near_integer(x, snapTol)) return static_cast<std::int64_t>(std::round(x));
  return static_cast<std::int64_t>(x >= 0 ? std::floor(x) : -std::floor(-x));
}

Eigen::MatrixXd matrix_power(const Eigen::MatrixXd& J, int k) {
  Eigen::MatrixXd r = Eigen::MatrixXd::Identity(J.rows(), J.cols());
  Eigen::MatrixXd b = J;
  while (k > 0) {
    if (k & 1) r = r * b;
    k >>= 1;
    if (k) b = b * b;
  }
  return r;
}

IntMatrix perturb_matrix(const Eigen::MatrixXd& Jk, Variant v, double snapTol) {
  const int n = static_cast<int>(Jk.rows());
  IntMatrix T(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      T(i, j) = v == Variant::Lower ? signed_ceil(Jk(i, j), snapTol) : signed_floor(Jk(i, j), snapTol);
  return T;
}

std::vector<IntVec> PerturbedDigits::raw() const {
  std::vector<IntVec> r;
  for (const auto& d : digits) r.push_back(d - translation);
  return r;
}

PerturbedDigits perturb_digits(const std::vector<Eigen::VectorXd>& tildeAk, Variant v, double snapTol) {
  PerturbedDigits out;
  if (tildeAk.empty()) return out;
  const int n = static_cast<int>(tildeAk[0].size());
  std::vector<IntVec> raw;
  for (const auto& a : tildeAk) {
    IntVec d(n);
    for (int i = 0; i < n; ++i) d[i] = v == Variant::Lower ? signed_floor(a[i], snapTol) : signed_ceil(a[i], snapTol);
    raw.push_back(std::move(d));
  }
  IntVec lexmin = *std::min_element(raw.begin(), raw.end());
  out.translation = -lexmin;
  for (const auto& d : raw) out.digits.push_back(d + out.translation);
  return out;
}

std::vector<IntVec> PerturbedSystem::rawDk() const {
  std::vector<IntVec> r;
  for (const auto& d : Dk) r.push_back(d - translation);
  return r;
}

PerturbedSystem build_perturbation(const IntMatrix& T, const std::vector<IntVec>& A, int k, Variant v,
                                   const PerturbOptions& opt) {
  if (!is_expanding(T, opt.expandTol)) throw Error(ErrorKind::NotExpanding, "generator is not expanding");
  return build_perturbation(real_jordan_form(T, opt.jordan), T, A, k, v, opt);
}

PerturbedSystem build_perturbation(const JordanData& jd, const IntMatrix& T, const std::vector<IntVec>& A, int k,
                                   Variant v, const PerturbOptions& opt) {
  if (k < 1) throw Error(ErrorKind::InvalidInput, "k must be >= 1");
  PerturbedSystem ps;
  ps.k = k;
  ps.variant = v;
  ps.jordan = jd;
  ps.Jk = matrix_power(jd.J, k);
  ps.Tk = perturb_matrix(ps.Jk, v, opt.snapTol);
  const Eigen::MatrixXd Pinv = jd.P.inverse();
  for (const auto& a : compose_digits_indexed(T, A, k, opt.budget)) ps.tildeAk.push_back(Pinv * to_eigen(a));
  auto pd = perturb_digits(ps.tildeAk, v, opt.snapTol);
  ps.Dk = std::move(pd.digits);
  ps.translation = std::move(pd.translation);
  bool exact = true;
  for (int i = 0; i < ps.Jk.rows() && exact; ++i)
    for (int j = 0; j < ps.Jk.cols() && exact; ++j) exact = near_integer(ps.Jk(i, j), opt.snapTol);
  for (const auto& a : ps.tildeAk)
    for (int i = 0; i < a.size() && exact; ++i) exact = near_integer(a[i], opt.snapTol);
  ps.exact = exact;
  bool expanding = false;
  std::string why;
  try {
    expanding = is_expanding(ps.Tk, opt.expandTol);
  } catch (const Error& e) {
    why = e.what();
  }
  if (!expanding) {
    std::string moduli;
    for (const auto& r : eigenvalues(ps.Tk).roots) moduli += " " + std::to_string(std::abs(r.value));
    throw Error(ErrorKind::NotExpanding,
                "perturbed matrix T_" + std::to_string(k) + " is not expanding; moduli:" + moduli);
  }
  return ps;
}

namespace {

class GridIndex {
 public:
  explicit GridIndex(const std::vector<Eigen::VectorXd>& pts) : pts_(pts) {
    n_ = static_cast<int>(pts[0].size());
    lo_ = pts[0];
    hi_ = pts[0];
    for (const auto& p : pts) {
      lo_ = lo_.cwiseMin(p);
      hi_ = hi_.cwiseMax(p);
    }
    double extent = (hi_ - lo_).maxCoeff();
    double cells = std::max(1.0, std::pow(static_cast<double>(pts.size()), 1.0 / n_));
    h_ = extent > 0 ? extent / cells : 1.0;
    for (size_t i = 0; i < pts.size(); ++i) cells_[key(pts[i])].push_back(static_cast<int>(i));
    span_ = static_cast<long>(std::ceil(extent / h_)) + 2;
  }

  double nearest(const Eigen::VectorXd& q) const {
    std::vector<long> c = key(q);
    double best = std::numeric_limits<double>::max();
    std::vector<long> off(n_);
    double outside = 0;
    for (int i = 0; i < n_; ++i) outside = std::max({outside, lo_[i] - q[i], q[i] - hi_[i]});
    long r0 = std::max(0L, static_cast<long>(std::floor(outside / h_)) - 1);
    for (long r = r0;; ++r) {
      // visit every cell on the Chebyshev shell of radius r
      std::fill(off.begin(), off.end(), -r);
      while (true) {
        long m = 0;
        for (auto o : off) m = std::max(m, std::labs(o));
        if (m == r) {
          std::vector<long> cc(n_);
          for (int i = 0; i < n_; ++i) cc[i] = c[i] + off[i];
          auto it = cells_.find(cc);
          if (it != cells_.end())
            for (int idx : it->second) best = std::min(best, (pts_[idx] - q).squaredNorm());
        }
        int i = 0;
        while (i < n_ && off[i] == r) off[i++] = -r;
        if (i == n_) break;
        ++off[i];
      }
      double reach = r * h_;
      if (best <= reach * reach) break;
      if (r > r0 + span_ + 2 && best < std::numeric_limits<double>::max()) break;
    }
    return std::sqrt(best);
  }

 private:
  std::vector<long> key(const Eigen::VectorXd& p) const {
    std::vector<long> k(n_);
    for (int i = 0; i < n_; ++i) k[i] = static_cast<long>(std::floor((p[i] - lo_[i]) / h_));
    return k;
  }
  const std::vector<Eigen::VectorXd>& pts_;
  int n_ = 0;
  Eigen::VectorXd lo_, hi_;
  double h_ = 1;
  long span_ = 0;
  std::map<std::vector<long>, std::vector<int>> cells_;
};

double directed(const std::vector<Eigen::VectorXd>& from, const GridIndex& to) {
  double d = 0;
  for (const auto& p : from) d = std::max(d, to.nearest(p));
  return d;
}

}  // namespace

double hausdorff_distance(const std::vector<Eigen::VectorXd>& a, const std::vector<Eigen::VectorXd>& b) {
  if (a.empty() || b.empty()) throw Error(ErrorKind::EmptyCloud, "Hausdorff distance of an empty cloud");
  if (a[0].size() != b[0].size()) throw Error(ErrorKind::InvalidInput, "cloud dimensions differ");
  GridIndex ia(a), ib(b);
  return std::max(directed(a, ib), directed(b, ia));
}

double hausdorff_distance(const PointCloud& a, const PointCloud& b) { return hausdorff_distance(a.points, b.points); }

DeflectionDiagnostics deflection_diagnostics(const IntMatrix& T, const std::vector<IntVec>& A, int k, int depth,
                                             std::size_t samples, std::uint64_t seed, Variant v,
                                             const PerturbOptions& opt) {
  PerturbedSystem ps = build_perturbation(T, A, k, v, opt);
  const int n = T.size();
  const int L = (depth + k - 1) / k;
  DeflectionDiagnostics dd;
  dd.k = k;
  dd.levels = L * k;
  const Eigen::MatrixXd Jinv = ps.Jk.inverse();
  const Eigen::MatrixXd Tinv = ps.Tk.to_eigen().inverse();
  std::vector<Eigen::VectorXd> raw;
  for (const auto& d : ps.rawDk()) raw.push_back(to_eigen(d));
  const auto& ta = ps.tildeAk;
  const std::size_t q = ta.size();

  std::vector<Eigen::VectorXd> xs, ys;
  double total = std::pow(static_cast<double>(q), L);
  if (total <= static_cast<double>(samples)) {
    xs.push_back(Eigen::VectorXd::Zero(n));
    ys.push_back(Eigen::VectorXd::Zero(n));
    for (int l = 0; l < L; ++l) {
      std::vector<Eigen::VectorXd> nx, ny;
      nx.reserve(xs.size() * q);
      ny.reserve(xs.size() * q);
      for (std::size_t j = 0; j < q; ++j)
        for (std::size_t i = 0; i < xs.size(); ++i) {
          nx.push_back(Jinv * (ta[j] + xs[i]));
          ny.push_back(Tinv * (raw[j] + ys[i]));
        }
      xs.swap(nx);
      ys.swap(ny);
    }
  } else {
    dd.sampled = true;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, q - 1);
    std::vector<std::size_t> idx(L);
    for (std::size_t s = 0; s < samples; ++s) {
      for (int l = 0; l < L; ++l) idx[l] = pick(rng);
      Eigen::VectorXd x = Eigen::VectorXd::Zero(n), y = Eigen::VectorXd::Zero(n);
      for (int l = L - 1; l >= 0; --l) {
        x = Jinv * (ta[idx[l]] + x);
        y = Tinv * (raw[idx[l]] + y);
      }
      xs.push_back(std::move(x));
      ys.push_back(std::move(y));
    }
  }
  dd.pairs = xs.size();
  for (std::size_t i = 0; i < xs.size(); ++i) dd.sampleSup = std::max(dd.sampleSup, (xs[i] - ys[i]).norm());
  dd.hausdorff = hausdorff_distance(xs, ys);

  double maxTilde = 0;
  for (const auto& a : ta) maxTilde = std::max(maxTilde, a.norm());
  Eigen::MatrixXd jp = Eigen::MatrixXd::Identity(n, n), tp = jp;
  for (int i = 1; i <= L; ++i) {
    jp = Jinv * jp;
    tp = Tinv * tp;
    dd.bound += (jp - tp).norm() * maxTilde + tp.norm() * std::sqrt(static_cast<double>(n));
  }
  RealSystem fs{ps.Jk, ta};
  RealSystem ks{ps.Tk.to_eigen(), raw};
  dd.errorRadius = std::max(jp.norm() * norm_upper_bound(fs), tp.norm() * norm_upper_bound(ks));
  return dd;
}

}  // namespace sadim
