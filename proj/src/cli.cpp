#include "sadim/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <png.h>

#include <CLI11.hpp>

namespace sadim {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void bad(const std::string& msg) { throw Error(ErrorKind::InvalidInput, msg); }

void check_keys(const Json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) bad(where + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) bad("unknown field '" + it.key() + "' in " + where);
  }
}

std::int64_t get_int(const Json& j, const std::string& name, std::int64_t lo, std::int64_t hi) {
  if (!j.is_number_integer()) bad(name + " must be an integer");
  std::int64_t v = j.is_number_unsigned() && j.get<std::uint64_t>() > std::uint64_t(INT64_MAX)
                       ? INT64_MAX
                       : j.get<std::int64_t>();
  if (v < lo || v > hi) bad(name + " out of range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return v;
}

double get_positive(const Json& j, const std::string& name) {
  if (!j.is_number()) bad(name + " must be a number");
  double v = j.get<double>();
  if (!(v > 0) || !std::isfinite(v)) bad(name + " must be positive");
  return v;
}

std::string get_string(const Json& j, const std::string& name) {
  if (!j.is_string()) bad(name + " must be a string");
  return j.get<std::string>();
}

std::vector<int> parse_k_list(const std::string& s) {
  std::vector<int> ks;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t pos = 0;
      int k = std::stoi(item, &pos);
      if (pos != item.size()) throw std::invalid_argument(item);
      ks.push_back(k);
    } catch (const std::exception&) {
      bad("--k expects a comma-separated list of integers, got '" + s + "'");
    }
  }
  return ks;
}

void write_file(const fs::path& p, const std::string& content) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary);
  if (!f) throw Error(ErrorKind::InvalidInput, "cannot write " + p.string());
  f << content;
}

}  // namespace

std::vector<Variant> RunConfig::variants() const {
  if (variant == "upper") return {Variant::Upper};
  if (variant == "both") return {Variant::Lower, Variant::Upper};
  return {Variant::Lower};
}

RunConfig parse_config(const Json& j) {
  check_keys(j, "config",
             {"schema_version", "matrix", "digits", "k_grid", "r_max", "r_min", "budgets", "tolerances", "variant",
              "seed", "outputs", "falconer_r", "graph_r", "render_depth"});
  RunConfig c;
  if (!j.contains("schema_version")) bad("schema_version is required");
  c.schemaVersion = static_cast<int>(get_int(j["schema_version"], "schema_version", 1, 1));
  if (!j.contains("matrix")) bad("matrix is required");
  if (!j.contains("digits")) bad("digits is required");
  c.T = matrix_from_json(j["matrix"]);
  c.digits = vectors_from_json(j["digits"], c.T.size());
  if (j.contains("k_grid")) {
    if (!j["k_grid"].is_array()) bad("k_grid must be an array");
    c.kGrid.clear();
    for (const auto& k : j["k_grid"]) c.kGrid.push_back(static_cast<int>(get_int(k, "k_grid entry", 1, 64)));
  }
  if (j.contains("r_max")) c.rMax = static_cast<int>(get_int(j["r_max"], "r_max", 1, 60));
  if (j.contains("r_min")) c.rMin = static_cast<int>(get_int(j["r_min"], "r_min", 0, 60));
  if (j.contains("budgets")) {
    const auto& b = j["budgets"];
    check_keys(b, "budgets", {"points", "lattice", "graph_vertices", "cylinders"});
    if (b.contains("points")) c.budgets.points = get_int(b["points"], "budgets.points", 1, INT64_MAX);
    if (b.contains("lattice")) c.budgets.lattice = get_int(b["lattice"], "budgets.lattice", 1, INT64_MAX);
    if (b.contains("graph_vertices"))
      c.budgets.graphVertices = get_int(b["graph_vertices"], "budgets.graph_vertices", 1, INT64_MAX);
    if (b.contains("cylinders")) c.budgets.cylinders = get_int(b["cylinders"], "budgets.cylinders", 1, INT64_MAX);
  }
  if (j.contains("tolerances")) {
    const auto& t = j["tolerances"];
    check_keys(t, "tolerances", {"snap", "expand", "rank", "falconer"});
    if (t.contains("snap")) c.tolerances.snap = get_positive(t["snap"], "tolerances.snap");
    if (t.contains("expand")) c.tolerances.expand = get_positive(t["expand"], "tolerances.expand");
    if (t.contains("rank")) c.tolerances.rank = get_positive(t["rank"], "tolerances.rank");
    if (t.contains("falconer")) c.tolerances.falconer = get_positive(t["falconer"], "tolerances.falconer");
  }
  if (j.contains("variant")) c.variant = get_string(j["variant"], "variant");
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) bad("seed must be a nonnegative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("outputs")) {
    const auto& o = j["outputs"];
    check_keys(o, "outputs", {"report", "image"});
    if (o.contains("report")) c.outputs.report = get_string(o["report"], "outputs.report");
    if (o.contains("image")) c.outputs.image = get_string(o["image"], "outputs.image");
  }
  if (j.contains("falconer_r")) c.falconerR = static_cast<int>(get_int(j["falconer_r"], "falconer_r", 2, 4096));
  if (j.contains("graph_r")) c.graphR = static_cast<int>(get_int(j["graph_r"], "graph_r", 1, 16));
  if (j.contains("render_depth")) c.renderDepth = static_cast<int>(get_int(j["render_depth"], "render_depth", 1, 64));
  validate(c);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) bad("cannot open config " + path);
  Json j;
  try {
    j = Json::parse(f);
  } catch (const Json::parse_error& e) {
    bad(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

Json to_json(const RunConfig& c) {
  Json j;
  j["schema_version"] = c.schemaVersion;
  j["matrix"] = to_json(c.T);
  j["digits"] = to_json(c.digits);
  j["k_grid"] = c.kGrid;
  j["r_max"] = c.rMax;
  j["r_min"] = c.rMin;
  j["budgets"] = {{"points", c.budgets.points},
                  {"lattice", c.budgets.lattice},
                  {"graph_vertices", c.budgets.graphVertices},
                  {"cylinders", c.budgets.cylinders}};
  j["tolerances"] = {{"snap", c.tolerances.snap},
                     {"expand", c.tolerances.expand},
                     {"rank", c.tolerances.rank},
                     {"falconer", c.tolerances.falconer}};
  j["variant"] = c.variant;
  j["seed"] = c.seed;
  Json out = Json::object();
  if (!c.outputs.report.empty()) out["report"] = c.outputs.report;
  if (!c.outputs.image.empty()) out["image"] = c.outputs.image;
  j["outputs"] = out;
  j["falconer_r"] = c.falconerR;
  j["graph_r"] = c.graphR;
  j["render_depth"] = c.renderDepth;
  return j;
}

void validate(const RunConfig& c) {
  if (c.schemaVersion != 1) bad("unsupported schema_version " + std::to_string(c.schemaVersion));
  if (c.T.size() == 0) bad("matrix is empty");
  if (c.digits.empty()) bad("digits is empty");
  for (const auto& d : c.digits)
    if (static_cast<int>(d.size()) != c.T.size()) bad("digit dimension differs from the matrix size");
  if (c.kGrid.empty()) bad("k_grid is empty");
  for (int k : c.kGrid)
    if (k < 1) bad("k_grid entries must be positive");
  if (c.rMax < 1) bad("r_max must be positive");
  if (c.rMin < 0 || c.rMin > c.rMax) bad("r_min must lie in [0, r_max]");
  if (c.variant != "lower" && c.variant != "upper" && c.variant != "both")
    bad("variant must be lower, upper or both, got '" + c.variant + "'");
}

PipelineConfig pipeline_config(const RunConfig& c) {
  PipelineConfig p;
  p.kGrid = c.kGrid;
  p.variants = c.variants();
  p.rMax = c.rMax;
  p.rMin = c.rMin;
  p.graphR = c.graphR;
  p.seed = c.seed;
  p.perturb.snapTol = c.tolerances.snap;
  p.perturb.expandTol = c.tolerances.expand;
  p.perturb.jordan.rankTol = c.tolerances.rank;
  p.perturb.budget = c.budgets.points;
  p.neighbor.latticeBudget = c.budgets.lattice;
  p.decon.maxVertices = c.budgets.graphVertices;
  p.boxcount.budget = c.budgets.cylinders;
  p.boxcount.seed = c.seed;
  p.falconer.rMax = c.falconerR;
  p.falconer.tol = c.tolerances.falconer;
  p.falconer.strict = false;
  return p;
}

void require_expanding(const IntMatrix& T, double tol) {
  if (is_expanding(T, tol)) return;
  std::string moduli;
  char buf[32];
  for (const auto& r : eigenvalues(T).roots) {
    std::snprintf(buf, sizeof buf, " %.9g", std::abs(r.value));
    moduli += buf;
  }
  throw Error(ErrorKind::NotExpanding, "matrix is not expanding; eigenvalue moduli:" + moduli);
}

void validate_report(const Json& j) {
  auto need = [&](const Json& o, const char* key, auto pred, const char* what) {
    if (!o.is_object() || !o.contains(key) || !pred(o[key])) bad(std::string("report field '") + key + "' " + what);
  };
  auto isInt = [](const Json& x) { return x.is_number_integer(); };
  auto isNum = [](const Json& x) { return x.is_number(); };
  auto isBool = [](const Json& x) { return x.is_boolean(); };
  auto isStr = [](const Json& x) { return x.is_string(); };
  auto isArr = [](const Json& x) { return x.is_array(); };
  need(j, "schema_version", [](const Json& x) { return x.is_number_integer() && x.get<int>() == 1; },
       "must be 1");
  need(j, "semantics", isStr, "must be a string");
  need(j, "matrix", isArr, "must be an array");
  need(j, "digits", isArr, "must be an array");
  need(j, "stationary", isBool, "must be a boolean");
  need(j, "rows", isArr, "must be an array");
  need(j, "partial", isBool, "must be a boolean");
  IntMatrix T = matrix_from_json(j["matrix"]);
  vectors_from_json(j["digits"], T.size());
  bool anyFailed = false;
  for (const auto& r : j["rows"]) {
    need(r, "k", isInt, "must be an integer");
    need(r, "variant", [](const Json& x) { return x == "lower" || x == "upper"; }, "must be lower or upper");
    need(r, "ok", isBool, "must be a boolean");
    need(r, "error", isStr, "must be a string");
    for (const char* key : {"box_dim", "v", "u"}) need(r, key, isNum, "must be a number");
    for (const char* key : {"digit_count", "distinct_digits"}) need(r, key, isInt, "must be an integer");
    for (const char* key : {"exact", "falconer_converged", "stabilized"}) need(r, key, isBool, "must be a boolean");
    need(r, "Tk", isArr, "must be an array");
    if (r["ok"].get<bool>()) {
      double b = r["box_dim"].get<double>();
      if (b < -1e-9 || b > T.size() + 1e-9) bad("row box_dim outside [0, n]");
    } else {
      anyFailed = true;
    }
  }
  need(j, "box_estimate", [](const Json& x) { return x.is_null() || x.is_object(); }, "must be null or an object");
  need(j, "box_estimate_error", isStr, "must be a string");
  if (j["box_estimate"].is_null()) anyFailed = true;
  need(j, "convergence", [](const Json& x) { return x.is_object(); }, "must be an object");
  need(j["convergence"], "last_delta", isNum, "must be a number");
  need(j["convergence"], "extrapolated", isNum, "must be a number");
  need(j["convergence"], "stabilization_k", isInt, "must be an integer");
  if (j["partial"].get<bool>() != anyFailed) bad("partial flag disagrees with the rows");
}

void render_png(const PointCloud& cloud, const std::string& path, int size) {
  std::vector<png_byte> img(static_cast<size_t>(size) * size, 255);
  if (!cloud.points.empty()) {
    const int n = static_cast<int>(cloud.points.front().size());
    double lo[2] = {INFINITY, INFINITY}, hi[2] = {-INFINITY, -INFINITY};
    for (const auto& p : cloud.points)
      for (int i = 0; i < std::min(n, 2); ++i) {
        lo[i] = std::min(lo[i], p[i]);
        hi[i] = std::max(hi[i], p[i]);
      }
    if (n == 1) lo[1] = hi[1] = 0;
    double span = std::max({hi[0] - lo[0], hi[1] - lo[1], 1e-300});
    double scale = (size - 1) / span;
    // center the shorter axis
    double off0 = ((size - 1) - (hi[0] - lo[0]) * scale) / 2, off1 = ((size - 1) - (hi[1] - lo[1]) * scale) / 2;
    for (const auto& p : cloud.points) {
      double y = n >= 2 ? p[1] : 0;
      int px = static_cast<int>(std::lround(off0 + (p[0] - lo[0]) * scale));
      int py = size - 1 - static_cast<int>(std::lround(off1 + (y - lo[1]) * scale));
      if (px >= 0 && px < size && py >= 0 && py < size) img[static_cast<size_t>(py) * size + px] = 0;
    }
  }

  fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  FILE* fp = std::fopen(path.c_str(), "wb");
  if (!fp) throw Error(ErrorKind::InvalidInput, "cannot write " + path);
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
    throw Error(ErrorKind::InvalidInput, "libpng failed writing " + path);
  }
  png_init_io(png, fp);
  png_set_IHDR(png, info, size, size, 8, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int r = 0; r < size; ++r) png_write_row(png, img.data() + static_cast<size_t>(r) * size);
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  std::fclose(fp);
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dimensions of integral self-affine sets"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string configPath, outDir, kList, variant, format = "both";
  std::optional<int> rmax;
  std::optional<std::uint64_t> seed;
  app.add_option("--config", configPath, "run configuration (JSON)")->required();
  app.add_option("--out", outDir, "output directory");
  app.add_option("--k", kList, "comma-separated k grid");
  app.add_option("--rmax", rmax, "box-count depth");
  app.add_option("--seed", seed, "random seed");
  app.add_option("--variant", variant, "lower|upper|both")->check(CLI::IsMember({"lower", "upper", "both"}));
  app.add_option("--format", format, "json|csv|both")->check(CLI::IsMember({"json", "csv", "both"}));

  auto* cDims = app.add_subcommand("dims", "full dimension pipeline");
  auto* cPerturb = app.add_subcommand("perturb", "perturbed systems T_k, D_k");
  auto* cNeighbors = app.add_subcommand("neighbors", "neighbor graph (DOT and JSON)");
  auto* cDecon = app.add_subcommand("decon", "labeled graph and Frobenius decomposition");
  auto* cBox = app.add_subcommand("boxcount", "mesh-count box dimension estimate");
  auto* cRender = app.add_subcommand("render", "PNG of the attractor cloud");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  RunConfig cfg;
  try {
    cfg = load_config(configPath);
    if (!kList.empty()) cfg.kGrid = parse_k_list(kList);
    if (rmax) cfg.rMax = *rmax;
    if (seed) cfg.seed = *seed;
    if (!variant.empty()) cfg.variant = variant;
    if (cfg.rMin > cfg.rMax) cfg.rMin = 0;
    validate(cfg);
    require_expanding(cfg.T, cfg.tolerances.expand);
  } catch (const std::exception& e) {
    err << "sadim: " << e.what() << '\n';
    return 1;
  }

  // --out wins over the paths in the config
  fs::path dir = outDir.empty() ? fs::path(".") : fs::path(outDir);
  fs::path reportJson = !outDir.empty() || cfg.outputs.report.empty() ? dir / "report.json" : fs::path(cfg.outputs.report);
  fs::path imagePath = !outDir.empty() || cfg.outputs.image.empty() ? dir / "attractor.png" : fs::path(cfg.outputs.image);
  const PipelineConfig pc = pipeline_config(cfg);

  try {
    if (cDims->parsed()) {
      DimensionReport rep = dimension_pipeline(cfg.T, cfg.digits, pc);
      Json j = to_json(rep);
      j["config"] = to_json(cfg);
      const std::string text = dump_json(j) + "\n";
      if (format != "csv") write_file(reportJson, text);
      if (format != "json") {
        std::ostringstream csv;
        write_report_csv(csv, rep);
        fs::path p = reportJson;
        write_file(p.replace_extension(".csv"), csv.str());
      }
      if (!cfg.outputs.image.empty()) {
        auto cloud = attractor_points(RealSystem::from(cfg.system()), cfg.renderDepth, cfg.budgets.points, cfg.seed);
        render_png(cloud, imagePath.string());
      }
      out << text;
      for (const auto& r : rep.rows)
        if (!r.ok) err << "sadim: k=" << r.k << " (" << to_string(r.variant) << "): " << r.error << '\n';
      if (!rep.boxFError.empty()) err << "sadim: box-count estimate: " << rep.boxFError << '\n';
      return rep.partial ? 2 : 0;
    }
    if (cPerturb->parsed()) {
      Json arr = Json::array();
      const JordanData jd = real_jordan_form(cfg.T, pc.perturb.jordan);
      for (Variant v : cfg.variants())
        for (int k : cfg.kGrid) arr.push_back(to_json(build_perturbation(jd, cfg.T, cfg.digits, k, v, pc.perturb)));
      Json j = {{"schema_version", 1}, {"systems", arr}};
      const std::string text = dump_json(j) + "\n";
      if (!outDir.empty()) write_file(dir / "perturb.json", text);
      out << text;
      return 0;
    }
    if (cNeighbors->parsed()) {
      NeighborGraph G = neighbor_graph(cfg.system(), pc.neighbor);
      const std::string dot = to_dot(G);
      write_file(dir / "graph.dot", dot);
      write_file(dir / "graph.json", dump_json(to_json(G)) + "\n");
      out << dot;
      return 0;
    }
    if (cDecon->parsed()) {
      SoficResult sr = sofic_box_dim_detail(cfg.system(), pc.decon);
      Json j;
      j["schema_version"] = 1;
      j["tile"] = to_json(sr.tile);
      j["graph"] = to_json(sr.graph);
      j["frobenius"] = to_json(sr.frobenius);
      Json comps = Json::array();
      for (double x : sr.componentValues) comps.push_back(std::isnan(x) ? Json(nullptr) : Json(x));
      j["component_values"] = comps;
      j["box_dim"] = sr.value;
      const std::string text = dump_json(j) + "\n";
      if (!outDir.empty()) {
        write_file(dir / "decon.json", text);
        write_file(dir / "decon.dot", to_dot(sr.graph));
      }
      out << text;
      return 0;
    }
    if (cBox->parsed()) {
      BoxDimEstimate est = box_dim_estimate(cfg.system(), cfg.rMin, cfg.rMax, pc.boxcount);
      Json j = to_json(est);
      j["schema_version"] = 1;
      const std::string text = dump_json(j) + "\n";
      if (!outDir.empty()) write_file(dir / "boxcount.json", text);
      out << text;
      return 0;
    }
    if (cRender->parsed()) {
      auto cloud = attractor_points(RealSystem::from(cfg.system()), cfg.renderDepth, cfg.budgets.points, cfg.seed);
      render_png(cloud, imagePath.string());
      return 0;
    }
  } catch (const Error& e) {
    err << "sadim: " << e.what() << '\n';
    return e.kind() == ErrorKind::InvalidInput || e.kind() == ErrorKind::NotExpanding ? 1 : 2;
  } catch (const std::exception& e) {
    err << "sadim: " << e.what() << '\n';
    return 2;
  }
  return 1;
}

}  // namespace sadim
