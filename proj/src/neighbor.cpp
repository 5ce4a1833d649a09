#include "sadim/neighbor.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

#include "sadim/ifs.hpp"

namespace sadim {

int NeighborGraph::find(const IntVec& s) const {
  auto it = std::find(vertices.begin(), vertices.end(), s);
  return it == vertices.end() ? -1 : static_cast<int>(it - vertices.begin());
}

std::vector<IntVec> NeighborGraph::offsets() const { return {vertices.begin() + 1, vertices.end()}; }

std::size_t NeighborGraph::labeled_edge_count() const {
  std::size_t c = 0;
  for (const auto& o : out)
    for (auto [d, t] : o) c += diffPairs[d].size();
  return c;
}

namespace {

std::string vec_str(const IntVec& v) {
  std::string s = "(";
  for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s + ")";
}

void lattice_ball(int n, double R, std::size_t budget, std::vector<IntVec>& out) {
  IntVec z(n, 0);
  const double R2 = R * R;
  std::function<void(int, double)> rec = [&](int i, double used) {
    if (i == n) {
      out.push_back(z);
      if (out.size() > budget)
        throw Error(ErrorKind::SizeLimit, "candidate ball holds more than " + std::to_string(budget) + " points");
      return;
    }
    long m = static_cast<long>(std::floor(std::sqrt(std::max(0.0, R2 - used))));
    for (long v = -m; v <= m; ++v) {
      z[i] = v;
      rec(i + 1, used + static_cast<double>(v) * v);
    }
    z[i] = 0;
  };
  rec(0, 0.0);
}

}  // namespace

NeighborGraph neighbor_graph(const IntSystem& sys, const NeighborOptions& opt) {
  sys.validate();
  const int n = sys.dim();
  NeighborGraph G;
  G.T = sys.T;
  G.digits = sys.A;
  std::unordered_map<IntVec, int, IntVecHash> diffIndex;
  for (size_t i = 0; i < sys.A.size(); ++i)
    for (size_t j = 0; j < sys.A.size(); ++j) {
      IntVec d = sys.A[j] - sys.A[i];
      auto [it, fresh] = diffIndex.emplace(d, static_cast<int>(G.diffs.size()));
      if (fresh) {
        G.diffs.push_back(d);
        G.diffPairs.emplace_back();
      }
      G.diffPairs[it->second].push_back({static_cast<int>(i), static_cast<int>(j)});
    }
  const double R = diam_upper_bound(RealSystem::from(IntSystem{sys.T, distinct(sys.A)})) + 0.5;
  std::vector<IntVec> cand;
  lattice_ball(n, R, opt.latticeBudget, cand);
  std::unordered_map<IntVec, int, IntVecHash> idx;
  for (size_t i = 0; i < cand.size(); ++i) idx.emplace(cand[i], static_cast<int>(i));
  const int N = static_cast<int>(cand.size());
  std::vector<std::vector<std::pair<int, int>>> out(N);
  std::vector<std::vector<int>> in(N);
  for (int v = 0; v < N; ++v) {
    IntVec ts = sys.T.apply(cand[v]);
    for (size_t d = 0; d < G.diffs.size(); ++d) {
      auto it = idx.find(ts + G.diffs[d]);
      if (it == idx.end()) continue;
      out[v].push_back({static_cast<int>(d), it->second});
      in[it->second].push_back(v);
    }
  }
  std::vector<char> alive(N, 1);
  std::vector<int> deg(N);
  std::deque<int> dead;
  for (int v = 0; v < N; ++v) {
    deg[v] = static_cast<int>(out[v].size());
    if (deg[v] == 0) dead.push_back(v);
  }
  while (!dead.empty()) {
    int v = dead.front();
    dead.pop_front();
    if (!alive[v]) continue;
    alive[v] = 0;
    for (int u : in[v])
      if (alive[u] && --deg[u] == 0) dead.push_back(u);
  }
  const IntVec zero(n, 0);
  std::vector<int> keep;
  for (int v = 0; v < N; ++v)
    if (alive[v] && cand[v] != zero) keep.push_back(v);
  std::sort(keep.begin(), keep.end(), [&](int a, int b) { return cand[a] < cand[b]; });
  keep.insert(keep.begin(), idx.at(zero));
  std::vector<int> remap(N, -1);
  for (size_t i = 0; i < keep.size(); ++i) remap[keep[i]] = static_cast<int>(i);
  for (int v : keep) {
    G.vertices.push_back(cand[v]);
    std::vector<std::pair<int, int>> o;
    for (auto [d, t] : out[v])
      if (alive[t]) o.push_back({d, remap[t]});
    std::sort(o.begin(), o.end());
    G.out.push_back(std::move(o));
  }
  return G;
}

bool is_symmetric(const NeighborGraph& G) {
  std::set<IntVec> s(G.vertices.begin(), G.vertices.end());
  for (const auto& v : G.vertices)
    if (!s.count(-v)) return false;
  return true;
}

std::vector<std::vector<LabelPair>> path_labels(const NeighborGraph& G, int r, const NeighborOptions& opt) {
  if (r < 1) throw Error(ErrorKind::InvalidInput, "r must be >= 1");
  std::vector<std::vector<LabelPair>> result;
  if (G.vertices.empty()) return result;
  std::vector<LabelPair> cur;
  std::function<void(int, int)> rec = [&](int v, int depth) {
    if (depth == r) {
      result.push_back(cur);
      if (result.size() > opt.pathBudget) throw Error(ErrorKind::SizeLimit, "too many label paths");
      return;
    }
    for (auto [d, t] : G.out[v])
      for (const auto& lp : G.diffPairs[d]) {
        cur.push_back(lp);
        rec(t, depth + 1);
        cur.pop_back();
      }
  };
  rec(0, 0);
  std::sort(result.begin(), result.end());
  return result;
}

namespace {

using Code = std::pair<unsigned __int128, unsigned __int128>;

std::set<Code> root_codes(const NeighborGraph& G, int L, unsigned __int128 base, unsigned __int128 divisor,
                          const NeighborOptions& opt) {
  std::set<Code> codes;
  std::size_t visited = 0;
  std::function<void(int, int, unsigned __int128, unsigned __int128)> rec = [&](int v, int depth,
                                                                                 unsigned __int128 I,
                                                                                 unsigned __int128 J) {
    if (depth == L) {
      codes.insert({I / divisor, J / divisor});
      if (++visited > opt.pathBudget) throw Error(ErrorKind::SizeLimit, "too many label paths");
      return;
    }
    for (auto [d, t] : G.out[v])
      for (auto [i, j] : G.diffPairs[d]) rec(t, depth + 1, I * base + i, J * base + j);
  };
  rec(0, 0, 0, 0);
  return codes;
}

}  // namespace

bool graphs_match(const NeighborGraph& Gref, const NeighborGraph& Gk, int r, const NeighborOptions& opt) {
  if (r < 1) throw Error(ErrorKind::InvalidInput, "r must be >= 1");
  const std::size_t q = Gref.digits.size(), Q = Gk.digits.size();
  if (q < 2) return Q == q && Gref.vertices == Gk.vertices;
  int k = 0;
  std::size_t p = 1;
  while (p < Q) p *= q, ++k;
  if (p != Q || k == 0) throw Error(ErrorKind::InvalidInput, "digit alphabet sizes are not q and q^k");
  const int L = (r + k - 1) / k;
  if (static_cast<double>(L) * k * std::log2(static_cast<double>(q)) > 120)
    throw Error(ErrorKind::SizeLimit, "label codes exceed 120 bits");
  unsigned __int128 divisor = 1;
  for (int i = 0; i < L * k - r; ++i) divisor *= q;
  auto ref = root_codes(Gref, r, q, 1, opt);
  auto cur = root_codes(Gk, L, Q, divisor, opt);
  return ref == cur;
}

bool is_connected_attractor(const IntSystem& sys, const NeighborOptions& opt) {
  auto digits = distinct(sys.A);
  if (digits.size() <= 1) return true;
  NeighborGraph G = neighbor_graph(IntSystem{sys.T, digits}, opt);
  std::set<IntVec> verts(G.vertices.begin(), G.vertices.end());
  std::vector<int> parent(digits.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> root = [&](int x) { return parent[x] == x ? x : parent[x] = root(parent[x]); };
  for (size_t i = 0; i < digits.size(); ++i)
    for (size_t j = i + 1; j < digits.size(); ++j)
      if (verts.count(digits[i] - digits[j])) parent[root(static_cast<int>(i))] = root(static_cast<int>(j));
  int r0 = root(0);
  for (size_t i = 1; i < digits.size(); ++i)
    if (root(static_cast<int>(i)) != r0) return false;
  return true;
}

std::string to_dot(const NeighborGraph& G) {
  std::ostringstream os;
  os << "digraph neighbors {\n";
  for (size_t v = 0; v < G.vertices.size(); ++v)
    os << "  v" << v << " [label=\"" << vec_str(G.vertices[v]) << "\"" << (v == 0 ? ", shape=doublecircle" : "")
       << "];\n";
  for (size_t v = 0; v < G.out.size(); ++v)
    for (auto [d, t] : G.out[v]) {
      os << "  v" << v << " -> v" << t << " [label=\"";
      const auto& pairs = G.diffPairs[d];
      for (size_t i = 0; i < pairs.size() && i < 8; ++i)
        os << (i ? " " : "") << "[" << pairs[i].first << "," << pairs[i].second << "]";
      if (pairs.size() > 8) os << " +" << pairs.size() - 8;
      os << "\"];\n";
    }
  os << "}\n";
  return os.str();
}

}  // namespace sadim
