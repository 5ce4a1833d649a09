#include "sadim/decon.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "sadim/linalg.hpp"

namespace sadim {

namespace {

struct Component {
  std::vector<int> coords;
  std::vector<IntVec> digits;  // over the component coordinates
  std::int64_t modulusSquared = 0;
};

std::int64_t floor_mod(std::int64_t a, std::int64_t m) {
  std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

std::vector<IntVec> box_digits(std::int64_t m, int d) {
  std::vector<IntVec> out{IntVec{}};
  for (int i = 0; i < d; ++i) {
    std::vector<IntVec> next;
    for (const auto& p : out)
      for (std::int64_t v = 0; v < m; ++v) {
        IntVec q = p;
        q.push_back(v);
        next.push_back(std::move(q));
      }
    out.swap(next);
  }
  return out;
}

// Lattice points of the half-open parallelogram spanned by (a, b) and (b, -a).
std::vector<IntVec> rotation_digits(std::int64_t a, std::int64_t b) {
  const std::int64_t N = a * a + b * b;
  std::int64_t xs[] = {0, a, b, a + b}, ys[] = {0, b, -a, b - a};
  std::int64_t x0 = *std::min_element(xs, xs + 4), x1 = *std::max_element(xs, xs + 4);
  std::int64_t y0 = *std::min_element(ys, ys + 4), y1 = *std::max_element(ys, ys + 4);
  std::vector<IntVec> out;
  for (std::int64_t x = x0; x <= x1; ++x)
    for (std::int64_t y = y0; y <= y1; ++y) {
      std::int64_t s = a * x + b * y, t = b * x - a * y;
      if (s >= 0 && s < N && t >= 0 && t < N) out.push_back({x, y});
    }
  return out;
}

std::vector<IntVec> product(const std::vector<IntVec>& a, const std::vector<IntVec>& b) {
  std::vector<IntVec> out;
  for (const auto& x : a)
    for (const auto& y : b) {
      IntVec z = x;
      z.insert(z.end(), y.begin(), y.end());
      out.push_back(std::move(z));
    }
  return out;
}

bool is_rotation(std::int64_t a, std::int64_t c, std::int64_t b, std::int64_t d) {
  return a == d && c == -b && b != 0;
}

// Classifies the sub-matrix on `coords`; empty digits when unsupported.
Component classify(const IntMatrix& T, const std::vector<int>& coords) {
  Component comp;
  comp.coords = coords;
  const int d = static_cast<int>(coords.size());
  auto at = [&](int i, int j) { return T(coords[i], coords[j]); };
  if (d == 1) {
    std::int64_t m = std::llabs(at(0, 0));
    if (m < 2) return comp;
    comp.modulusSquared = m * m;
    comp.digits = box_digits(m, 1);
    return comp;
  }
  bool lower = true, upper = true, constDiag = true;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      if (j > i && at(i, j) != 0) lower = false;
      if (j < i && at(i, j) != 0) upper = false;
    }
  for (int i = 1; i < d; ++i) constDiag = constDiag && at(i, i) == at(0, 0);
  if ((lower || upper) && constDiag && std::llabs(at(0, 0)) >= 2) {
    std::int64_t m = std::llabs(at(0, 0));
    comp.modulusSquared = m * m;
    comp.digits = box_digits(m, d);
    return comp;
  }
  if (d % 2) return comp;
  const std::int64_t a = at(0, 0), c = at(0, 1), b = at(1, 0);
  for (int k = 0; k < d; k += 2)
    if (at(k, k) != a || at(k, k + 1) != c || at(k + 1, k) != b || at(k + 1, k + 1) != a) return comp;
  if (!is_rotation(a, c, b, a)) return comp;
  bool blower = true, bupper = true;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      if (j / 2 > i / 2 && at(i, j) != 0) blower = false;
      if (j / 2 < i / 2 && at(i, j) != 0) bupper = false;
    }
  if (!blower && !bupper) return comp;
  comp.modulusSquared = a * a + b * b;
  if (comp.modulusSquared < 2) return comp;
  auto rot = rotation_digits(a, b);
  comp.digits = rot;
  for (int k = 2; k < d; k += 2) comp.digits = product(comp.digits, rot);
  return comp;
}

void finish_tile(AuxiliaryTile& tile) {
  const int n = tile.T.size();
  tile.det = tile.T.det();
  tile.adj = tile.T.adjugate();
  tile.a = IntVec(n, 0);
  tile.residueKey.clear();
  if (static_cast<std::int64_t>(tile.Dprime.size()) != std::llabs(tile.det))
    throw Error(ErrorKind::UnsupportedShape, "digit count differs from |det T|");
  for (size_t i = 0; i < tile.Dprime.size(); ++i)
    if (!tile.residueKey.emplace(tile.key(tile.Dprime[i]), static_cast<int>(i)).second)
      throw Error(ErrorKind::UnsupportedShape, "tile digits are not a complete residue system");
}

}  // namespace

IntVec AuxiliaryTile::permute(const IntVec& v) const {
  IntVec r(v.size());
  for (size_t i = 0; i < order.size(); ++i) r[i] = v[order[i]];
  return r;
}

IntVec AuxiliaryTile::unpermute(const IntVec& v) const {
  IntVec r(v.size());
  for (size_t i = 0; i < order.size(); ++i) r[order[i]] = v[i];
  return r;
}

IntVec AuxiliaryTile::key(const IntVec& z) const {
  IntVec k = adj.apply(z);
  const std::int64_t m = std::llabs(det);
  for (auto& x : k) x = floor_mod(x, m);
  return k;
}

int AuxiliaryTile::residue_index(const IntVec& z) const {
  auto it = residueKey.find(key(z));
  if (it == residueKey.end()) throw Error(ErrorKind::InvalidInput, "residue lookup failed");
  return it->second;
}

IntVec AuxiliaryTile::quotient(const IntVec& z) const {
  IntVec q = adj.apply(z - Dprime[residue_index(z)]);
  for (auto& x : q) x /= det;
  return q;
}

IntSystem AuxiliaryTile::gamma() const {
  IntSystem s{T, {}};
  for (const auto& d : Dprime) {
    IntVec v = d;
    for (auto& x : v) x = checked_mul(x, c0);
    s.A.push_back(a + v);
  }
  return s;
}

AuxiliaryTile auxiliary_tile(const IntMatrix& T, bool allowCube) {
  const int n = T.size();
  if (n == 0) throw Error(ErrorKind::InvalidInput, "empty matrix");
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> root = [&](int x) { return parent[x] == x ? x : parent[x] = root(parent[x]); };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && T(i, j) != 0) parent[root(i)] = root(j);
  std::map<int, std::vector<int>> byRoot;
  for (int i = 0; i < n; ++i) byRoot[root(i)].push_back(i);
  std::vector<Component> comps;
  bool ok = true;
  for (auto& [r, coords] : byRoot) {
    comps.push_back(classify(T, coords));
    if (comps.back().digits.empty()) ok = false;
  }
  if (ok) {
    std::stable_sort(comps.begin(), comps.end(), [](const Component& a, const Component& b) {
      if (a.modulusSquared != b.modulusSquared) return a.modulusSquared < b.modulusSquared;
      return a.coords.front() < b.coords.front();
    });
    AuxiliaryTile tile;
    std::vector<IntVec> digits{IntVec{}};
    for (const auto& c : comps) {
      if (tile.groups.empty() || tile.groups.back().modulusSquared != c.modulusSquared)
        tile.groups.push_back({std::sqrt(static_cast<double>(c.modulusSquared)), c.modulusSquared,
                               static_cast<int>(tile.order.size()), 0});
      tile.groups.back().dim += static_cast<int>(c.coords.size());
      tile.order.insert(tile.order.end(), c.coords.begin(), c.coords.end());
      digits = product(digits, c.digits);
    }
    tile.T = T.permuted(tile.order);
    tile.Dprime = std::move(digits);
    finish_tile(tile);
    return tile;
  }
  if (!allowCube) throw Error(ErrorKind::UnsupportedShape, "generator matches none of the supported block forms");
  double minMod = std::numeric_limits<double>::max();
  for (const auto& r : eigenvalues(T).roots) minMod = std::min(minMod, std::abs(r.value));
  auto m = static_cast<std::int64_t>(std::floor(minMod + 1e-9));
  if (m < 2) throw Error(ErrorKind::UnsupportedShape, "cube fallback needs least modulus >= 2");
  AuxiliaryTile tile;
  tile.cube = true;
  tile.order.resize(n);
  std::iota(tile.order.begin(), tile.order.end(), 0);
  tile.T = IntMatrix::diagonal(IntVec(n, m));
  tile.Dprime = box_digits(m, n);
  tile.groups.push_back({static_cast<double>(m), m * m, 0, n});
  finish_tile(tile);
  return tile;
}

IntMatrix LabeledGraph::adjacency() const {
  IntMatrix B(static_cast<int>(vertices.size()));
  for (size_t i = 0; i < out.size(); ++i)
    for (auto [l, t] : out[i]) B(static_cast<int>(i), t) += 1;
  return B;
}

bool LabeledGraph::right_resolving() const {
  for (const auto& o : out) {
    std::set<int> seen;
    for (auto [l, t] : o)
      if (!seen.insert(l).second) return false;
  }
  return true;
}

std::size_t LabeledGraph::edge_count() const {
  std::size_t c = 0;
  for (const auto& o : out) c += o.size();
  return c;
}

LabeledGraph delta_closure(const IntMatrix& T, const std::vector<IntVec>& A, const AuxiliaryTile& tile,
                           const DeconOptions& opt) {
  IntSystem{T, A}.validate();
  if (tile.cube || T.permuted(tile.order) != tile.T)
    throw Error(ErrorKind::InvalidInput, "tile generator differs from the system generator");
  const int n = T.size();
  std::vector<IntVec> digits;
  for (const auto& a : distinct(A)) digits.push_back(tile.permute(a));
  const IntMatrix& Tp = tile.T;

  // carries w -> q(w + a), closed from 0, then shrunk to the invariant part
  std::set<IntVec> W{IntVec(n, 0)};
  std::deque<IntVec> queue{IntVec(n, 0)};
  while (!queue.empty()) {
    IntVec w = queue.front();
    queue.pop_front();
    for (const auto& a : digits) {
      IntVec q = tile.quotient(w + a);
      if (W.insert(q).second) {
        if (W.size() > opt.maxOffsets) throw Error(ErrorKind::SizeLimit, "carry set exceeds offset budget");
        queue.push_back(std::move(q));
      }
    }
  }
  while (true) {
    std::set<IntVec> next;
    for (const auto& w : W)
      for (const auto& a : digits) next.insert(tile.quotient(w + a));
    if (next == W) break;
    W.swap(next);
  }

  std::vector<IntVec> states;
  for (const auto& w : W) states.push_back(-w);
  std::sort(states.begin(), states.end());
  std::map<IntVec, int> sid;
  for (size_t i = 0; i < states.size(); ++i) sid[states[i]] = static_cast<int>(i);
  const int S = static_cast<int>(states.size());

  // offset automaton u --d'--> T u + a - d'
  std::vector<std::vector<std::pair<int, int>>> nfa(S);
  std::vector<std::vector<int>> rev(S);
  for (int s = 0; s < S; ++s) {
    IntVec tu = Tp.apply(states[s]);
    for (const auto& a : digits) {
      IntVec x = tu + a;
      for (size_t li = 0; li < tile.Dprime.size(); ++li) {
        auto it = sid.find(x - tile.Dprime[li]);
        if (it == sid.end()) continue;
        nfa[s].push_back({static_cast<int>(li), it->second});
        rev[it->second].push_back(s);
      }
    }
    std::sort(nfa[s].begin(), nfa[s].end());
    nfa[s].erase(std::unique(nfa[s].begin(), nfa[s].end()), nfa[s].end());
  }
  std::vector<char> alive(S, 1);
  std::vector<int> deg(S);
  std::deque<int> dead;
  for (int s = 0; s < S; ++s)
    if ((deg[s] = static_cast<int>(nfa[s].size())) == 0) dead.push_back(s);
  while (!dead.empty()) {
    int s = dead.front();
    dead.pop_front();
    if (!alive[s]) continue;
    alive[s] = 0;
    for (int u : rev[s])
      if (alive[u] && --deg[u] == 0) dead.push_back(u);
  }

  LabeledGraph G;
  G.n = n;
  G.labels = tile.Dprime;
  std::vector<int> rootSet;
  for (int s = 0; s < S; ++s)
    if (alive[s]) rootSet.push_back(s);
  if (rootSet.empty()) throw Error(ErrorKind::InvalidInput, "no surviving offsets");
  std::map<std::vector<int>, int> vid;
  std::vector<std::vector<int>> sets;
  auto intern = [&](std::vector<int> set) {
    auto [it, fresh] = vid.emplace(set, static_cast<int>(sets.size()));
    if (fresh) {
      if (sets.size() >= opt.maxVertices)
        throw Error(ErrorKind::SizeLimit, "more than " + std::to_string(opt.maxVertices) + " vertices");
      sets.push_back(std::move(set));
      G.out.emplace_back();
    }
    return it->second;
  };
  intern(rootSet);
  for (size_t v = 0; v < sets.size(); ++v) {
    std::map<int, std::set<int>> children;
    for (int s : sets[v])
      for (auto [l, t] : nfa[s])
        if (alive[t]) children[l].insert(t);
    for (auto& [l, ch] : children) {
      int t = intern(std::vector<int>(ch.begin(), ch.end()));
      G.out[v].push_back({l, t});
    }
  }
  for (const auto& set : sets) {
    std::vector<IntVec> offs;
    for (int s : set) offs.push_back(states[s]);
    G.vertices.push_back(std::move(offs));
  }
  return G;
}

LabeledGraph project_coords(const LabeledGraph& G, int coords, const DeconOptions& opt) {
  if (coords < 1 || coords > G.n) throw Error(ErrorKind::InvalidInput, "projection coordinate count out of range");
  std::vector<IntVec> proj;
  for (const auto& l : G.labels) {
    IntVec p;
    for (int c = 0; c < G.width; ++c)
      for (int i = 0; i < coords; ++i) p.push_back(l[static_cast<size_t>(c) * G.n + i]);
    proj.push_back(std::move(p));
  }
  LabeledGraph H;
  H.n = coords;
  H.width = G.width;
  std::map<IntVec, int> pl;
  for (const auto& p : proj) pl.emplace(p, 0);
  for (auto& [p, idx] : pl) {
    idx = static_cast<int>(H.labels.size());
    H.labels.push_back(p);
  }
  std::vector<int> labelMap;
  for (const auto& p : proj) labelMap.push_back(pl.at(p));

  std::map<std::vector<int>, int> vid;
  auto intern = [&](std::vector<int> set) {
    auto [it, fresh] = vid.emplace(set, static_cast<int>(H.members.size()));
    if (fresh) {
      if (H.members.size() >= opt.maxVertices)
        throw Error(ErrorKind::SizeLimit, "projected graph exceeds " + std::to_string(opt.maxVertices) + " vertices");
      H.members.push_back(std::move(set));
      H.out.emplace_back();
    }
    return it->second;
  };
  if (G.vertices.empty()) return H;
  intern({0});
  for (size_t v = 0; v < H.members.size(); ++v) {
    std::map<int, std::set<int>> children;
    for (int s : H.members[v])
      for (auto [l, t] : G.out[s]) children[labelMap[l]].insert(t);
    for (auto& [l, ch] : children) {
      int t = intern(std::vector<int>(ch.begin(), ch.end()));
      H.out[v].push_back({l, t});
    }
  }
  for (const auto& m : H.members) {
    std::set<IntVec> offs;
    for (int s : m) offs.insert(G.vertices[s].begin(), G.vertices[s].end());
    H.vertices.emplace_back(offs.begin(), offs.end());
  }
  return H;
}

LabeledGraph project_graph(const LabeledGraph& G, const AuxiliaryTile& tile, int p, const DeconOptions& opt) {
  if (p < 1 || p > static_cast<int>(tile.groups.size()))
    throw Error(ErrorKind::InvalidInput, "group prefix out of range");
  const auto& g = tile.groups[p - 1];
  return project_coords(G, g.offset + g.dim, opt);
}

std::vector<std::vector<IntVec>> label_language(const LabeledGraph& G, int len, std::size_t budget) {
  std::set<std::vector<IntVec>> words;
  if (G.vertices.empty()) return {};
  std::vector<IntVec> cur;
  std::size_t visits = 0;
  std::function<void(int, int)> rec = [&](int v, int depth) {
    if (depth == len) {
      words.insert(cur);
      if (++visits > budget) throw Error(ErrorKind::SizeLimit, "language enumeration budget exceeded");
      return;
    }
    for (auto [l, t] : G.out[v]) {
      cur.push_back(G.labels[l]);
      rec(t, depth + 1);
      cur.pop_back();
    }
  };
  rec(0, 0);
  return {words.begin(), words.end()};
}

FrobeniusDecomposition frobenius_decompose(const IntMatrix& B) {
  if (!B.is_nonnegative()) throw Error(ErrorKind::InvalidInput, "frobenius_decompose needs a nonnegative matrix");
  const int n = B.size();
  std::vector<std::vector<int>> adj(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (B(i, j) > 0) adj[i].push_back(j);
  auto sccs = strongly_connected_components(adj);
  for (auto& c : sccs) std::sort(c.begin(), c.end());
  std::sort(sccs.begin(), sccs.end());
  FrobeniusDecomposition fd;
  std::int64_t lcm = 1;
  std::vector<int> comp(n, -1), level(n, -1);
  for (size_t ci = 0; ci < sccs.size(); ++ci)
    for (int v : sccs[ci]) comp[v] = static_cast<int>(ci);
  for (size_t ci = 0; ci < sccs.size(); ++ci) {
    FrobeniusComponent fc;
    fc.vertices = sccs[ci];
    const int m = static_cast<int>(fc.vertices.size());
    if (m == 1 && B(fc.vertices[0], fc.vertices[0]) == 0) {
      fd.components.push_back(std::move(fc));
      continue;
    }
    std::deque<int> q{fc.vertices[0]};
    level[fc.vertices[0]] = 0;
    while (!q.empty()) {
      int u = q.front();
      q.pop_front();
      for (int v : adj[u])
        if (comp[v] == static_cast<int>(ci) && level[v] < 0) {
          level[v] = level[u] + 1;
          q.push_back(v);
        }
    }
    int g = 0;
    for (int u : fc.vertices)
      for (int v : adj[u])
        if (comp[v] == static_cast<int>(ci)) g = std::gcd(g, std::abs(level[u] + 1 - level[v]));
    fc.period = g;
    fc.classes.resize(g);
    for (int v : fc.vertices) fc.classes[level[v] % g].push_back(v);
    IntMatrix C(m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) C(i, j) = B(fc.vertices[i], fc.vertices[j]);
    fc.spectralRadius = spectral_radius(C);
    IntMatrix Cp = C.pow(g);
    for (const auto& cls : fc.classes) {
      IntMatrix blk(static_cast<int>(cls.size()));
      for (size_t i = 0; i < cls.size(); ++i)
        for (size_t j = 0; j < cls.size(); ++j) {
          int a = static_cast<int>(std::lower_bound(fc.vertices.begin(), fc.vertices.end(), cls[i]) - fc.vertices.begin());
          int b = static_cast<int>(std::lower_bound(fc.vertices.begin(), fc.vertices.end(), cls[j]) - fc.vertices.begin());
          blk(static_cast<int>(i), static_cast<int>(j)) = Cp(a, b);
        }
      fc.blocks.push_back(std::move(blk));
    }
    lcm = std::lcm(lcm, static_cast<std::int64_t>(g));
    fd.components.push_back(std::move(fc));
  }
  fd.p = static_cast<int>(lcm);
  return fd;
}

bool is_primitive(const IntMatrix& B) {
  if (B.size() == 0) return false;
  auto fd = frobenius_decompose(B);
  return fd.components.size() == 1 && fd.components[0].period == 1;
}

std::string to_dot(const LabeledGraph& G) {
  auto vec = [](const IntVec& v) {
    std::string s = "(";
    for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s + ")";
  };
  std::ostringstream os;
  os << "digraph deconstruction {\n";
  for (size_t v = 0; v < G.vertices.size(); ++v) {
    os << "  v" << v << " [label=\"{";
    for (size_t i = 0; i < G.vertices[v].size() && i < 6; ++i) os << (i ? " " : "") << vec(G.vertices[v][i]);
    if (G.vertices[v].size() > 6) os << " +" << G.vertices[v].size() - 6;
    os << "}\"" << (v == 0 ? ", shape=doublecircle" : "") << "];\n";
  }
  for (size_t v = 0; v < G.out.size(); ++v)
    for (auto [l, t] : G.out[v]) os << "  v" << v << " -> v" << t << " [label=\"" << vec(G.labels[l]) << "\"];\n";
  os << "}\n";
  return os.str();
}

}  // namespace sadim
