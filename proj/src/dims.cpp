#include "sadim/dims.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <thread>

namespace sadim {

const char* to_string(CountMethod m) { return m == CountMethod::Exhaustive ? "exhaustive" : "sampled"; }

namespace {

double least_modulus(const IntMatrix& T) {
  double mn = std::numeric_limits<double>::max();
  for (const auto& r : eigenvalues(T).roots) mn = std::min(mn, std::abs(r.value));
  return mn;
}

double snap(double x, double tol = 1e-9) { return near_integer(x, tol) ? std::round(x) : x; }

// First and last open cell index met by the closed interval [a, b] in grid units.
std::pair<std::int64_t, std::int64_t> cell_range(double a, double b) {
  std::int64_t lo = near_integer(a) ? static_cast<std::int64_t>(std::round(a)) : static_cast<std::int64_t>(std::floor(a));
  std::int64_t hi = near_integer(b) ? static_cast<std::int64_t>(std::round(b)) - 1
                                    : static_cast<std::int64_t>(std::floor(b));
  return {lo, hi};
}

struct Mesh {
  Eigen::VectorXd origin;
  double side = 1;
  std::int64_t cells = 1;  // per coordinate
  int bits = 1;

  bool pack(const std::vector<std::int64_t>& idx, std::uint64_t& key) const {
    key = 0;
    for (size_t e = 0; e < idx.size(); ++e) {
      if (idx[e] < 0 || idx[e] >= cells) return false;
      key |= static_cast<std::uint64_t>(idx[e]) << (bits * e);
    }
    return true;
  }
};

// Calls visit(partialSum) on every leaf at depth d, split over prefix tasks.
template <class Visit>
std::vector<std::uint64_t> enumerate_leaves(const std::vector<std::vector<Eigen::VectorXd>>& terms, int d, int threads,
                                            Visit visit) {
  const std::size_t q = terms[1].size();
  int t = 0;
  std::size_t tasks = 1;
  while (t < d && tasks < static_cast<std::size_t>(8 * threads)) ++t, tasks *= q;
  const int n = static_cast<int>(terms[1][0].size());
  auto run = [&](std::size_t begin, std::size_t stride) {
    std::vector<std::uint64_t> keys;
    std::vector<Eigen::VectorXd> partial(d + 1, Eigen::VectorXd::Zero(n));
    std::vector<std::size_t> digit(d + 1, 0);
    for (std::size_t task = begin; task < tasks; task += stride) {
      std::size_t rem = task;
      std::vector<std::size_t> pre(t);
      for (int i = t - 1; i >= 0; --i) pre[i] = rem % q, rem /= q;
      for (int i = 1; i <= t; ++i) partial[i] = partial[i - 1] + terms[i][pre[i - 1]];
      if (t == d) {
        visit(partial[d], keys);
        continue;
      }
      int level = t + 1;
      digit[level] = 0;
      while (level > t) {
        if (digit[level] == q) {
          --level;
          if (level > t) ++digit[level];
          continue;
        }
        partial[level] = partial[level - 1] + terms[level][digit[level]];
        if (level == d) {
          visit(partial[d], keys);
          ++digit[level];
        } else {
          ++level;
          digit[level] = 0;
        }
      }
      std::sort(keys.begin(), keys.end());
      keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    }
    return keys;
  };
  std::vector<std::future<std::vector<std::uint64_t>>> fut;
  for (int w = 0; w < threads; ++w) fut.push_back(std::async(std::launch::async, run, w, threads));
  std::vector<std::uint64_t> all;
  for (auto& f : fut) {
    auto k = f.get();
    all.insert(all.end(), k.begin(), k.end());
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  return all;
}

}  // namespace

IntSystem grid_system(const IntSystem& sys, int* squarings) {
  IntSystem s{sys.T, distinct(sys.A)};
  int count = 0;
  while (least_modulus(s.T) < 2 - 1e-9) {
    if (count == 8) throw Error(ErrorKind::NotExpanding, "least modulus stays below 2 after 8 squarings");
    s = IntSystem{s.T * s.T, compose_digits(s.T, s.A, 2, std::numeric_limits<std::size_t>::max())};
    ++count;
  }
  if (squarings) *squarings = count;
  return s;
}

BoxCountResult box_count(const IntSystem& input, int r, const BoxCountOptions& opt) {
  if (r < 1) throw Error(ErrorKind::InvalidInput, "r must be >= 1");
  input.validate();
  BoxCountResult res;
  res.r = r;
  res.seed = opt.seed;
  IntSystem sys = grid_system(input, &res.squarings);
  const int n = sys.dim();
  const std::size_t q = sys.A.size();
  const auto m = static_cast<std::int64_t>(std::floor(least_modulus(sys.T) + 1e-9));
  res.base = m;
  const double mr = std::pow(static_cast<double>(m), r);
  if (q == 1) {
    res.side = 1 / mr;
    res.lowerCount = res.upperCount = 1;
    return res;
  }
  RealSystem rs = RealSystem::from(sys);
  const Eigen::MatrixXd inv = rs.T.inverse();

  // certified bounding box from the support sums plus a tail
  Eigen::VectorXd lo = Eigen::VectorXd::Zero(n), hi = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd P = Eigen::MatrixXd::Identity(n, n);
  for (int i = 1; i <= 64; ++i) {
    P = inv * P;
    for (int e = 0; e < n; ++e) {
      double mn = std::numeric_limits<double>::max(), mx = -mn;
      for (const auto& a : rs.A) {
        double v = P.row(e).dot(a);
        mn = std::min(mn, v);
        mx = std::max(mx, v);
      }
      lo[e] += mn;
      hi[e] += mx;
    }
  }
  const double tail = P.norm() * norm_upper_bound(rs) * (1 + 1e-12);
  Mesh mesh;
  mesh.origin.resize(n);
  double extent = 0;
  for (int e = 0; e < n; ++e) {
    lo[e] = snap(lo[e] - tail);
    hi[e] = snap(hi[e] + tail);
    mesh.origin[e] = std::floor(lo[e]);
    extent = std::max(extent, hi[e] - mesh.origin[e]);
  }
  double c0 = 1;
  while (c0 < extent - 1e-9) c0 *= static_cast<double>(m);
  res.c0 = c0;
  mesh.side = c0 / mr;
  res.side = mesh.side;
  if (mr > 9e15) throw Error(ErrorKind::SizeLimit, "mesh too fine for 64-bit cell indices");
  mesh.cells = static_cast<std::int64_t>(mr);
  while ((std::int64_t(1) << mesh.bits) < mesh.cells) ++mesh.bits;
  if (mesh.bits * n > 64) throw Error(ErrorKind::SizeLimit, "cell keys exceed 64 bits");

  const Eigen::VectorXd center = (lo + hi) / 2, half = (hi - lo) / 2;
  std::vector<Eigen::MatrixXd> pows{Eigen::MatrixXd::Identity(n, n)};
  int target = 0;
  for (int d = 1; d <= 400; ++d) {
    pows.push_back(inv * pows.back());
    Eigen::VectorXd w = 2 * pows[d].cwiseAbs() * half;
    if (w.maxCoeff() <= mesh.side / 4) {
      target = d;
      break;
    }
  }
  if (target == 0) throw Error(ErrorKind::NonConvergence, "cylinders do not shrink below the mesh size");
  int cap = 0;
  for (double c = q; c <= static_cast<double>(opt.budget); c *= q) ++cap;
  cap = std::max(cap, 1);
  res.upperDepth = std::min(target, cap);
  res.lowerDepth = target;
  res.method = target <= cap ? CountMethod::Exhaustive : CountMethod::Sampled;

  std::vector<std::vector<Eigen::VectorXd>> terms(target + 1);
  for (int i = 1; i <= target; ++i)
    for (const auto& a : rs.A) terms[i].push_back(pows[i] * a);
  const int threads = opt.threads > 0 ? opt.threads : std::max(1u, std::thread::hardware_concurrency());

  // a point of F off the obvious grid: fixed point of a cycle through several digits
  Eigen::VectorXd xstar = Eigen::VectorXd::Zero(n);
  const std::size_t wl = std::min<std::size_t>(q, n + 1);
  for (int it = 0; it < 400; ++it)
    for (std::size_t i = wl; i-- > 0;) xstar = inv * (rs.A[i] + xstar);

  auto upperVisit = [&, d = res.upperDepth](const Eigen::VectorXd& p, std::vector<std::uint64_t>& keys) {
    Eigen::VectorXd c = p + pows[d] * center;
    Eigen::VectorXd w = pows[d].cwiseAbs() * half * (1 + 1e-12);
    std::vector<std::int64_t> from(n), to(n), idx(n);
    for (int e = 0; e < n; ++e) {
      auto [a, b] = cell_range((c[e] - w[e] - mesh.origin[e]) / mesh.side, (c[e] + w[e] - mesh.origin[e]) / mesh.side);
      from[e] = std::max<std::int64_t>(a, 0);
      to[e] = std::min<std::int64_t>(b, mesh.cells - 1);
      if (from[e] > to[e]) return;
    }
    idx = from;
    while (true) {
      std::uint64_t key;
      if (mesh.pack(idx, key)) keys.push_back(key);
      int e = 0;
      while (e < n && idx[e] == to[e]) idx[e] = from[e], ++e;
      if (e == n) break;
      ++idx[e];
    }
  };
  auto lowerVisit = [&](const Eigen::VectorXd& p, std::vector<std::uint64_t>& keys) {
    Eigen::VectorXd x = p + pows[target] * xstar;
    std::vector<std::int64_t> idx(n);
    for (int e = 0; e < n; ++e) {
      double t = (x[e] - mesh.origin[e]) / mesh.side;
      if (near_integer(t)) return;
      idx[e] = static_cast<std::int64_t>(std::floor(t));
    }
    std::uint64_t key;
    if (mesh.pack(idx, key)) keys.push_back(key);
  };

  res.upperCount = static_cast<std::int64_t>(enumerate_leaves(terms, res.upperDepth, threads, upperVisit).size());
  if (res.method == CountMethod::Exhaustive) {
    res.lowerCount = static_cast<std::int64_t>(enumerate_leaves(terms, target, threads, lowerVisit).size());
  } else {
    std::mt19937_64 rng(opt.seed);
    std::uniform_int_distribution<std::size_t> pick(0, q - 1);
    std::vector<std::uint64_t> keys;
    for (std::size_t s = 0; s < opt.budget; ++s) {
      Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
      for (int i = 1; i <= target; ++i) p += terms[i][pick(rng)];
      lowerVisit(p, keys);
    }
    std::sort(keys.begin(), keys.end());
    res.lowerCount = static_cast<std::int64_t>(std::unique(keys.begin(), keys.end()) - keys.begin());
  }
  return res;
}

namespace {

std::pair<double, double> fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double k = static_cast<double>(x.size());
  double mx = std::accumulate(x.begin(), x.end(), 0.0) / k, my = std::accumulate(y.begin(), y.end(), 0.0) / k;
  double sxy = 0, sxx = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  double slope = sxy / sxx, res = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    double e = y[i] - my - slope * (x[i] - mx);
    res += e * e;
  }
  return {slope, std::sqrt(res / k)};
}

}  // namespace

BoxDimEstimate box_dim_estimate(const IntSystem& sys, int rMin, int rMax, const BoxCountOptions& opt) {
  if (rMin == 0) rMin = (rMax + 1) / 2;
  if (rMin < 1 || rMax <= rMin) throw Error(ErrorKind::InvalidInput, "need rMax > rMin >= 1");
  BoxDimEstimate est;
  est.rMin = rMin;
  est.rMax = rMax;
  std::vector<double> x, yl, yu;
  for (int r = rMin; r <= rMax; ++r) {
    BoxCountResult bc = box_count(sys, r, opt);
    if (bc.lowerCount <= 0 || bc.upperCount <= 0)
      throw Error(ErrorKind::EmptyCloud, "attractor meets no open mesh cube at r = " + std::to_string(r));
    x.push_back(-std::log(bc.side));
    yl.push_back(std::log(static_cast<double>(bc.lowerCount)));
    yu.push_back(std::log(static_cast<double>(bc.upperCount)));
    est.counts.push_back(bc);
  }
  std::tie(est.lower, est.lowerResidual) = fit_slope(x, yl);
  std::tie(est.upper, est.upperResidual) = fit_slope(x, yu);
  return est;
}

double telescoping_sum(const std::vector<double>& lambdas, const std::vector<double>& moduli) {
  if (lambdas.size() != moduli.size()) throw Error(ErrorKind::InvalidInput, "lambda and moduli counts differ");
  double prev = 1, sum = 0, lastMod = 1;
  for (size_t p = 0; p < lambdas.size(); ++p) {
    if (!(moduli[p] > lastMod)) throw Error(ErrorKind::ModuliNotOrdered, "moduli must increase and exceed 1");
    lastMod = moduli[p];
    sum += std::log(lambdas[p] / prev) / std::log(moduli[p]);
    prev = lambdas[p];
  }
  return sum;
}

double mcmullen_box_dim(const LabeledGraph& G, const std::vector<ModulusGroup>& groups, const DeconOptions& opt) {
  if (!is_primitive(G.adjacency())) throw Error(ErrorKind::NotPrimitive, "adjacency matrix is not primitive");
  std::vector<double> lambdas, moduli;
  for (const auto& g : groups) {
    LabeledGraph H = project_coords(G, g.offset + g.dim, opt);
    lambdas.push_back(spectral_radius(H.adjacency()));
    moduli.push_back(std::pow(g.modulus, G.width));
  }
  return telescoping_sum(lambdas, moduli);
}

double mcmullen_box_dim(const LabeledGraph& G, const AuxiliaryTile& tile, const DeconOptions& opt) {
  return mcmullen_box_dim(G, tile.groups, opt);
}

double sponge_box_dim(const IntMatrix& T, const std::vector<IntVec>& A) {
  IntSystem{T, A}.validate();
  const int n = T.size();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && T(i, j) != 0) throw Error(ErrorKind::InvalidInput, "sponge formula needs a diagonal matrix");
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return std::llabs(T(a, a)) < std::llabs(T(b, b)); });
  for (int i = 0; i < n; ++i)
    if (std::llabs(T(i, i)) < 2) throw Error(ErrorKind::ModuliNotOrdered, "diagonal moduli must be >= 2");
  auto digits = distinct(A);
  for (const auto& a : digits)
    for (int i = 0; i < n; ++i)
      if (a[i] < 0 || a[i] >= std::llabs(T(i, i)))
        throw Error(ErrorKind::DigitsOutOfRange, "digit coordinate outside {0..m-1}");
  std::vector<double> counts, moduli;
  for (int p = 0; p < n; ++p) {
    std::int64_t mod = std::llabs(T(order[p], order[p]));
    if (p + 1 < n && std::llabs(T(order[p + 1], order[p + 1])) == mod) continue;  // close the group first
    std::set<IntVec> prefixes;
    for (const auto& a : digits) {
      IntVec pre;
      for (int i = 0; i <= p; ++i) pre.push_back(a[order[i]]);
      prefixes.insert(pre);
    }
    counts.push_back(static_cast<double>(prefixes.size()));
    moduli.push_back(static_cast<double>(mod));
  }
  return telescoping_sum(counts, moduli);
}

LabeledGraph power_graph(const LabeledGraph& G, const FrobeniusComponent& comp) {
  if (comp.trivial()) throw Error(ErrorKind::InvalidInput, "trivial component has no power graph");
  const std::vector<int>& cls = comp.classes[0];
  std::set<int> inComp(comp.vertices.begin(), comp.vertices.end());
  std::map<int, int> local;
  for (size_t i = 0; i < cls.size(); ++i) local[cls[i]] = static_cast<int>(i);
  LabeledGraph P;
  P.n = G.n;
  P.width = G.width * comp.period;
  P.out.resize(cls.size());
  std::map<IntVec, int> labelIdx;
  std::vector<std::vector<std::pair<IntVec, int>>> raw(cls.size());
  IntVec word;
  std::function<void(int, int, int)> walk = [&](int src, int v, int depth) {
    if (depth == comp.period) {
      raw[src].push_back({word, local.at(v)});
      labelIdx.emplace(word, 0);
      return;
    }
    for (auto [l, t] : G.out[v]) {
      if (!inComp.count(t)) continue;
      size_t keep = word.size();
      word.insert(word.end(), G.labels[l].begin(), G.labels[l].end());
      walk(src, t, depth + 1);
      word.resize(keep);
    }
  };
  for (size_t i = 0; i < cls.size(); ++i) walk(static_cast<int>(i), cls[i], 0);
  for (auto& [w, idx] : labelIdx) {
    idx = static_cast<int>(P.labels.size());
    P.labels.push_back(w);
  }
  for (size_t i = 0; i < cls.size(); ++i) {
    for (auto& [w, t] : raw[i]) P.out[i].push_back({labelIdx.at(w), t});
    std::sort(P.out[i].begin(), P.out[i].end());
    P.vertices.push_back(G.vertices[cls[i]]);
    P.members.push_back({cls[i]});
  }
  return P;
}

SoficResult sofic_box_dim_detail(const IntSystem& sys, const DeconOptions& opt) {
  sys.validate();
  SoficResult res;
  res.tile = auxiliary_tile(sys.T);
  res.graph = delta_closure(sys.T, sys.A, res.tile, opt);
  res.frobenius = frobenius_decompose(res.graph.adjacency());
  double best = 0;
  for (const auto& comp : res.frobenius.components) {
    if (comp.trivial()) {
      res.componentValues.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    double v = mcmullen_box_dim(power_graph(res.graph, comp), res.tile.groups, opt);
    res.componentValues.push_back(v);
    best = std::max(best, v);
  }
  res.value = std::clamp(best, 0.0, static_cast<double>(sys.dim()));
  return res;
}

double sofic_box_dim(const IntSystem& sys, const DeconOptions& opt) { return sofic_box_dim_detail(sys, opt).value; }

namespace {

using LMat = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;

// Singular values of T^r, descending.
std::vector<long double> power_singular_values(const IntMatrix& T, int r) {
  const int n = T.size();
  LMat base(n, n), acc = LMat::Identity(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) base(i, j) = static_cast<long double>(T(i, j));
  for (int i = 0; i < r; ++i) acc = base * acc;
  Eigen::JacobiSVD<LMat> svd(acc);
  auto sv = svd.singularValues();
  return std::vector<long double>(sv.data(), sv.data() + sv.size());
}

double log_svf(const std::vector<long double>& logAlpha, double s) {
  const int n = static_cast<int>(logAlpha.size());
  if (s <= 0) return 0;
  if (s > n) {
    long double sum = 0;
    for (auto a : logAlpha) sum += a;
    return static_cast<double>(sum * s / n);
  }
  int m = static_cast<int>(std::ceil(s));
  long double sum = 0;
  for (int i = 0; i < m - 1; ++i) sum += logAlpha[i];
  sum += (s - m + 1) * logAlpha[m - 1];
  return static_cast<double>(sum);
}

std::vector<long double> log_alpha_inverse(const IntMatrix& T, int r) {
  auto sv = power_singular_values(T, r);
  std::vector<long double> la;
  for (auto it = sv.rbegin(); it != sv.rend(); ++it) la.push_back(-std::log(*it));
  return la;
}

std::vector<long double> log_alpha_forward(const IntMatrix& T, int r) {
  std::vector<long double> la;
  for (auto s : power_singular_values(T, r)) la.push_back(std::log(s));
  return la;
}

// Root in [0, n] of a decreasing function.
double bisect(const std::function<double(double)>& h, int n, double tol) {
  if (h(0) <= 0) return 0;
  if (h(n) >= 0) return n;
  double a = 0, b = n;
  while (b - a > tol) {
    double c = 0.5 * (a + b);
    (h(c) > 0 ? a : b) = c;
  }
  return 0.5 * (a + b);
}

}  // namespace

double log_svf_inverse(const IntMatrix& T, double s, int r) { return log_svf(log_alpha_inverse(T, r), s); }
double log_svf_forward(const IntMatrix& T, double s, int r) { return log_svf(log_alpha_forward(T, r), s); }
double svf(const IntMatrix& T, double s, int r) { return std::exp(log_svf_inverse(T, s, r)); }

FalconerBounds falconer_bounds(const LabeledGraph& G, const IntMatrix& T, const FalconerOptions& opt) {
  if (G.vertices.empty()) throw Error(ErrorKind::InvalidInput, "empty graph");
  if (opt.rMax < 2) throw Error(ErrorKind::InvalidInput, "rMax must be >= 2");
  const int n = T.size();
  const IntMatrix B = G.adjacency();
  const double growthU = std::log(std::max(1.0, spectral_radius(B)));

  // paths from a vertex grow like the largest radius among reachable components
  auto fd = frobenius_decompose(B);
  const int V = B.size();
  std::vector<double> compRho(V, 0);
  for (const auto& c : fd.components)
    for (int v : c.vertices) compRho[v] = c.trivial() ? 0 : c.spectralRadius;
  double growthV = std::numeric_limits<double>::max();
  for (int i = 0; i < V; ++i) {
    std::vector<char> seen(V, 0);
    std::vector<int> stack{i};
    seen[i] = 1;
    double best = 0;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      best = std::max(best, compRho[u]);
      for (int j = 0; j < V; ++j)
        if (B(u, j) > 0 && !seen[j]) seen[j] = 1, stack.push_back(j);
    }
    growthV = std::min(growthV, std::log(std::max(1.0, best)));
  }

  auto solve = [&](int r, double& u, double& v) {
    auto inv = log_alpha_inverse(T, r);
    auto fwd = log_alpha_forward(T, r);
    u = bisect([&](double s) { return growthU + log_svf(inv, s) / r; }, n, opt.tol);
    v = bisect([&](double s) { return growthV - log_svf(fwd, s) / r; }, n, opt.tol);
  };
  FalconerBounds fb;
  solve(opt.rMax / 2, fb.uHalf, fb.vHalf);
  solve(opt.rMax, fb.u, fb.v);
  fb.converged = std::fabs(fb.u - fb.uHalf) <= 10 * opt.tol && std::fabs(fb.v - fb.vHalf) <= 10 * opt.tol;
  if (!fb.converged && opt.strict)
    throw Error(ErrorKind::NonConvergence, "finite-r values differ: u " + std::to_string(fb.uHalf) + " vs " +
                                               std::to_string(fb.u) + ", v " + std::to_string(fb.vHalf) + " vs " +
                                               std::to_string(fb.v));
  return fb;
}

DimensionReport dimension_pipeline(const IntMatrix& T, const std::vector<IntVec>& A, const PipelineConfig& cfg) {
  IntSystem{T, A}.validate();
  if (distinct(A).size() < 2) throw Error(ErrorKind::InvalidInput, "need at least two distinct digits");
  if (cfg.kGrid.empty()) throw Error(ErrorKind::InvalidInput, "empty k grid");
  for (int k : cfg.kGrid)
    if (k < 1) throw Error(ErrorKind::InvalidInput, "k must be >= 1");
  bool expanding = false;
  try {
    expanding = is_expanding(T, cfg.perturb.expandTol);
  } catch (const Error&) {
  }
  if (!expanding) {
    std::string moduli;
    for (const auto& r : eigenvalues(T).roots) moduli += " " + std::to_string(std::abs(r.value));
    throw Error(ErrorKind::NotExpanding, "matrix is not expanding; eigenvalue moduli:" + moduli);
  }
  const JordanData jd = real_jordan_form(T, cfg.perturb.jordan);
  DimensionReport rep;
  rep.T = T;
  rep.A = A;
  const PerturbedSystem level1 = build_perturbation(jd, T, A, 1, Variant::Lower, cfg.perturb);
  rep.stationary = level1.exact;

  std::optional<NeighborGraph> gref;
  std::string grefError;
  try {
    gref = neighbor_graph(IntSystem{T, A}, cfg.neighbor);
  } catch (const Error& e) {
    grefError = e.what();
  }

  auto task = [&](int k, Variant v) {
    PerKRow row;
    row.k = k;
    row.variant = v;
    auto t0 = std::chrono::steady_clock::now();
    try {
      PerturbedSystem ps = build_perturbation(jd, T, A, k, v, cfg.perturb);
      row.Tk = ps.Tk;
      row.digitCount = ps.Dk.size();
      row.distinctDigits = distinct(ps.Dk).size();
      row.exact = ps.exact;
      // every level of an exact perturbation is the same set; evaluate it once
      IntSystem dimSys = rep.stationary ? level1.system() : ps.system();
      SoficResult sr = sofic_box_dim_detail(dimSys, cfg.decon);
      FalconerBounds fb = falconer_bounds(sr.graph, sr.tile.T, cfg.falconer);
      row.boxDim = sr.value;
      row.v = fb.v;
      row.u = fb.u;
      row.falconerConverged = fb.converged;
      if (!gref) throw Error(ErrorKind::SizeLimit, "reference neighbor graph: " + grefError);
      row.graphStabilized = graphs_match(*gref, neighbor_graph(ps.system(), cfg.neighbor), cfg.graphR, cfg.neighbor);
      row.ok = true;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    row.wallMs = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return row;
  };
  const auto policy = cfg.parallel ? std::launch::async : std::launch::deferred;
  auto boxFuture = std::async(policy, [&]() { return box_dim_estimate(IntSystem{T, A}, cfg.rMin, cfg.rMax, cfg.boxcount); });
  std::vector<std::future<PerKRow>> rows;
  for (Variant v : cfg.variants)
    for (int k : cfg.kGrid) rows.push_back(std::async(policy, task, k, v));
  for (auto& f : rows) {
    rep.rows.push_back(f.get());
    rep.partial = rep.partial || !rep.rows.back().ok;
  }
  try {
    rep.boxF = boxFuture.get();
  } catch (const std::exception& e) {
    rep.boxFError = e.what();
    rep.partial = true;
  }

  std::vector<const PerKRow*> first;
  for (const auto& r : rep.rows)
    if (r.variant == cfg.variants.front()) first.push_back(&r);
  std::sort(first.begin(), first.end(), [](auto a, auto b) { return a->k < b->k; });
  std::vector<double> seq;
  for (auto r : first)
    if (r->ok) seq.push_back(r->boxDim);
  if (seq.size() >= 2) rep.lastDelta = std::fabs(seq.back() - seq[seq.size() - 2]);
  rep.extrapolated = seq.empty() ? 0 : seq.back();
  if (seq.size() >= 3) {
    double x0 = seq[seq.size() - 3], x1 = seq[seq.size() - 2], x2 = seq.back();
    double den = x2 - 2 * x1 + x0;
    if (std::fabs(den) > 1e-12) rep.extrapolated = std::clamp(x2 - (x2 - x1) * (x2 - x1) / den, 0.0, double(T.size()));
  }
  for (size_t i = first.size(); i-- > 0;) {
    if (!first[i]->ok || !first[i]->graphStabilized) break;
    rep.stabilizationK = first[i]->k;
  }
  return rep;
}

}  // namespace sadim
