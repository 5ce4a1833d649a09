#include "sadim/io.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace sadim {

namespace {

std::string fmt(double x) {
  if (std::isnan(x)) return "null";
  if (std::isinf(x)) return x > 0 ? "1e999" : "-1e999";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  std::string s = buf;
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

void dump(std::ostringstream& os, const Json& j, int indent, int level) {
  auto pad = [&](int l) {
    if (indent >= 0) os << '\n' << std::string(static_cast<size_t>(indent) * l, ' ');
  };
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ',';
        first = false;
        pad(level + 1);
        os << Json(it.key()).dump() << (indent >= 0 ? ": " : ":");
        dump(os, it.value(), indent, level + 1);
      }
      pad(level);
      os << '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      // arrays of scalars stay on one line
      bool flat = true;
      for (const auto& e : j) flat = flat && !e.is_structured();
      os << '[';
      bool first = true;
      for (const auto& e : j) {
        if (!first) os << (flat && indent >= 0 ? ", " : ",");
        first = false;
        if (!flat) pad(level + 1);
        dump(os, e, indent, level + 1);
      }
      if (!flat) pad(level);
      os << ']';
      return;
    }
    case Json::value_t::number_float:
      os << fmt(j.get<double>());
      return;
    default:
      os << j.dump();
  }
}

}  // namespace

std::string dump_json(const Json& j, int indent) {
  std::ostringstream os;
  dump(os, j, indent, 0);
  return os.str();
}

Json to_json(const IntMatrix& M) {
  Json j = Json::array();
  for (const auto& r : M.rows()) j.push_back(r);
  return j;
}

Json to_json(const std::vector<IntVec>& vs) {
  Json j = Json::array();
  for (const auto& v : vs) j.push_back(v);
  return j;
}

Json to_json(const NeighborGraph& G) {
  Json j;
  j["matrix"] = to_json(G.T);
  j["digits"] = to_json(G.digits);
  j["vertices"] = to_json(G.vertices);
  Json edges = Json::array();
  for (size_t v = 0; v < G.out.size(); ++v)
    for (auto [d, t] : G.out[v]) {
      Json labels = Json::array();
      for (auto [a, b] : G.diffPairs[d]) labels.push_back({a, b});
      edges.push_back({{"from", v}, {"to", t}, {"difference", G.diffs[d]}, {"labels", labels}});
    }
  j["edges"] = edges;
  return j;
}

Json to_json(const LabeledGraph& G) {
  Json j;
  j["dimension"] = G.n;
  j["label_width"] = G.width;
  Json verts = Json::array();
  for (const auto& v : G.vertices) verts.push_back(to_json(v));
  j["vertices"] = verts;
  Json edges = Json::array();
  for (size_t v = 0; v < G.out.size(); ++v)
    for (auto [l, t] : G.out[v]) edges.push_back(Json::array({v, G.labels[l], t}));
  j["edges"] = edges;
  j["adjacency"] = to_json(G.adjacency());
  return j;
}

Json to_json(const FrobeniusDecomposition& fd) {
  Json j;
  j["p"] = fd.p;
  Json comps = Json::array();
  for (const auto& c : fd.components) {
    Json cj;
    cj["vertices"] = c.vertices;
    cj["period"] = c.period;
    cj["classes"] = c.classes;
    cj["spectral_radius"] = c.spectralRadius;
    Json blocks = Json::array();
    for (const auto& b : c.blocks) blocks.push_back(to_json(b));
    cj["blocks"] = blocks;
    comps.push_back(cj);
  }
  j["components"] = comps;
  return j;
}

Json to_json(const AuxiliaryTile& tile) {
  Json j;
  j["matrix"] = to_json(tile.T);
  j["order"] = tile.order;
  j["digits"] = to_json(tile.Dprime);
  j["a"] = tile.a;
  j["c0"] = tile.c0;
  j["cube"] = tile.cube;
  Json groups = Json::array();
  for (const auto& g : tile.groups)
    groups.push_back({{"modulus", g.modulus}, {"offset", g.offset}, {"dim", g.dim}});
  j["groups"] = groups;
  return j;
}

Json to_json(const PerturbedSystem& ps) {
  Json j;
  j["k"] = ps.k;
  j["variant"] = to_string(ps.variant);
  j["Tk"] = to_json(ps.Tk);
  j["Dk"] = to_json(ps.Dk);
  j["translation"] = ps.translation;
  j["exact"] = ps.exact;
  return j;
}

Json to_json(const BoxCountResult& bc) {
  return {{"r", bc.r},           {"side", bc.side},         {"lower", bc.lowerCount},
          {"upper", bc.upperCount}, {"method", to_string(bc.method)}, {"seed", bc.seed},
          {"lower_depth", bc.lowerDepth}, {"upper_depth", bc.upperDepth}, {"base", bc.base},
          {"c0", bc.c0},         {"squarings", bc.squarings}};
}

Json to_json(const BoxDimEstimate& est) {
  Json counts = Json::array();
  for (const auto& c : est.counts) counts.push_back(to_json(c));
  return {{"lower", est.lower},
          {"upper", est.upper},
          {"lower_residual", est.lowerResidual},
          {"upper_residual", est.upperResidual},
          {"r_min", est.rMin},
          {"r_max", est.rMax},
          {"counts", counts}};
}

Json to_json(const PerKRow& row) {
  Json j;
  j["k"] = row.k;
  j["variant"] = to_string(row.variant);
  j["ok"] = row.ok;
  j["error"] = row.error;
  j["Tk"] = row.Tk.size() ? to_json(row.Tk) : Json::array();
  j["digit_count"] = row.digitCount;
  j["distinct_digits"] = row.distinctDigits;
  j["exact"] = row.exact;
  j["box_dim"] = row.boxDim;
  j["v"] = row.v;
  j["u"] = row.u;
  j["falconer_converged"] = row.falconerConverged;
  j["stabilized"] = row.graphStabilized;
  return j;
}

Json to_json(const DimensionReport& rep) {
  Json j;
  j["schema_version"] = 1;
  j["semantics"] =
      "box_dim is the exact box dimension of the perturbed system F_k; [v, u] are Falconer-type bounds for F_k "
      "at finite r; box_estimate is the mesh-count regression for F itself";
  j["matrix"] = to_json(rep.T);
  j["digits"] = to_json(rep.A);
  j["stationary"] = rep.stationary;
  Json rows = Json::array();
  for (const auto& r : rep.rows) rows.push_back(to_json(r));
  j["rows"] = rows;
  j["box_estimate"] = rep.boxF ? to_json(*rep.boxF) : Json(nullptr);
  j["box_estimate_error"] = rep.boxFError;
  j["convergence"] = {{"last_delta", rep.lastDelta},
                      {"extrapolated", rep.extrapolated},
                      {"stabilization_k", rep.stabilizationK}};
  j["partial"] = rep.partial;
  return j;
}

IntMatrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw Error(ErrorKind::InvalidInput, "matrix must be a nonempty array of rows");
  std::vector<IntVec> rows;
  for (const auto& r : j) {
    if (!r.is_array() || r.size() != j.size()) throw Error(ErrorKind::InvalidInput, "matrix must be square");
    IntVec row;
    for (const auto& x : r) {
      if (!x.is_number_integer()) throw Error(ErrorKind::InvalidInput, "matrix entries must be integers");
      row.push_back(x.get<std::int64_t>());
    }
    rows.push_back(row);
  }
  return IntMatrix::from_rows(rows);
}

std::vector<IntVec> vectors_from_json(const Json& j, int dim) {
  if (!j.is_array() || j.empty()) throw Error(ErrorKind::InvalidInput, "digits must be a nonempty array");
  std::vector<IntVec> out;
  for (const auto& v : j) {
    if (!v.is_array() || static_cast<int>(v.size()) != dim)
      throw Error(ErrorKind::InvalidInput, "digit dimension differs from the matrix size");
    IntVec d;
    for (const auto& x : v) {
      if (!x.is_number_integer()) throw Error(ErrorKind::InvalidInput, "digit entries must be integers");
      d.push_back(x.get<std::int64_t>());
    }
    out.push_back(d);
  }
  return out;
}

void write_report_csv(std::ostream& os, const DimensionReport& rep) {
  os << "k,variant,boxdim_Fk,v_k,u_k,stabilized,wall_ms\n";
  for (const auto& r : rep.rows) {
    os << r.k << ',' << to_string(r.variant) << ',';
    if (r.ok)
      os << fmt(r.boxDim) << ',' << fmt(r.v) << ',' << fmt(r.u) << ',' << (r.graphStabilized ? 1 : 0);
    else
      os << ",,,";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", r.wallMs);
    os << ',' << buf << '\n';
  }
}

}  // namespace sadim
