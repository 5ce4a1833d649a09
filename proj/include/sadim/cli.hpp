#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sadim/io.hpp"

namespace sadim {

struct RunConfig {
  int schemaVersion = 1;
  IntMatrix T;
  std::vector<IntVec> digits;
  std::vector<int> kGrid{1, 2, 3, 4};
  int rMax = 10;
  int rMin = 0;  // 0: half of rMax
  struct Budgets {
    std::size_t points = kDefaultPointBudget;
    std::size_t lattice = std::size_t(1) << 20;
    std::size_t graphVertices = 20000;
    std::size_t cylinders = std::size_t(1) << 22;
  } budgets;
  struct Tolerances {
    double snap = 1e-9;
    double expand = 1e-9;
    double rank = 1e-8;
    double falconer = 1e-8;
  } tolerances;
  std::string variant = "lower";  // lower | upper | both
  std::uint64_t seed = 0;
  struct Outputs {
    std::string report;  // JSON report path; the CSV goes next to it
    std::string image;   // PNG path, empty for none
  } outputs;
  int falconerR = 32;
  int graphR = 2;
  int renderDepth = 8;

  IntSystem system() const { return {T, digits}; }
  std::vector<Variant> variants() const;
};

// Unknown keys are rejected at every level.
RunConfig parse_config(const Json& j);
RunConfig load_config(const std::string& path);
Json to_json(const RunConfig& cfg);
void validate(const RunConfig& cfg);

PipelineConfig pipeline_config(const RunConfig& cfg);

// Throws NotExpanding naming the eigenvalue moduli.
void require_expanding(const IntMatrix& T, double tol);

// Structural check of a report produced by to_json(DimensionReport).
void validate_report(const Json& j);

// Grayscale PNG, white background, one black pixel per point. Coordinates
// beyond the second are dropped.
void render_png(const PointCloud& cloud, const std::string& path, int size = 1024);

// Exit codes: 0 success, 1 configuration or validation error, 2 computation failure
// (the report is still written when a pipeline row fails).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sadim
