#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sadim/decon.hpp"
#include "sadim/linalg.hpp"
#include "sadim/neighbor.hpp"
#include "sadim/perturb.hpp"

namespace sadim {

enum class CountMethod { Exhaustive, Sampled };
const char* to_string(CountMethod m);

struct BoxCountOptions {
  std::size_t budget = std::size_t(1) << 22;  // cylinders per count
  std::uint64_t seed = 0;
  int threads = 0;  // 0: hardware concurrency
};

// Mesh of open cubes origin + side * (i + (0,1)^n); N^r counts cubes whose
// interior meets the attractor.
struct BoxCountResult {
  int r = 0;
  double side = 0;
  std::int64_t lowerCount = 0;
  std::int64_t upperCount = 0;
  CountMethod method = CountMethod::Exhaustive;
  std::uint64_t seed = 0;
  int lowerDepth = 0;
  int upperDepth = 0;
  std::int64_t base = 0;  // grid refinement factor m
  double c0 = 1;
  int squarings = 0;      // times the system was replaced by (T^2, A + T A)
};

// Passes to (T^2, A + TA) until the least eigenvalue modulus is at least 2.
IntSystem grid_system(const IntSystem& sys, int* squarings = nullptr);

BoxCountResult box_count(const IntSystem& sys, int r, const BoxCountOptions& opt = {});

struct BoxDimEstimate {
  double lower = 0;  // slope of the lower counts
  double upper = 0;  // slope of the upper counts
  double lowerResidual = 0;
  double upperResidual = 0;
  int rMin = 0, rMax = 0;
  std::vector<BoxCountResult> counts;
};

// rMin = 0 selects ceil(rMax / 2).
BoxDimEstimate box_dim_estimate(const IntSystem& sys, int rMin, int rMax, const BoxCountOptions& opt = {});

// Sum over groups of log(lambda_p / lambda_{p-1}) / log m_p.
double mcmullen_box_dim(const LabeledGraph& G, const AuxiliaryTile& tile, const DeconOptions& opt = {});

// Same telescoping sum for a graph whose labels hold `width` tile digits, with
// group moduli raised to that power.
double mcmullen_box_dim(const LabeledGraph& G, const std::vector<ModulusGroup>& groups, const DeconOptions& opt = {});

double telescoping_sum(const std::vector<double>& lambdas, const std::vector<double>& moduli);

double sponge_box_dim(const IntMatrix& T, const std::vector<IntVec>& A);

struct SoficResult {
  double value = 0;
  AuxiliaryTile tile;
  LabeledGraph graph;
  FrobeniusDecomposition frobenius;
  std::vector<double> componentValues;  // NaN for trivial components
};

SoficResult sofic_box_dim_detail(const IntSystem& sys, const DeconOptions& opt = {});
double sofic_box_dim(const IntSystem& sys, const DeconOptions& opt = {});

// Graph of p-step paths inside one cyclic class of a component, labels
// concatenated.
LabeledGraph power_graph(const LabeledGraph& G, const FrobeniusComponent& comp);

// phi^s of T^{-r} and its log.
double svf(const IntMatrix& T, double s, int r);
double log_svf_inverse(const IntMatrix& T, double s, int r);
double log_svf_forward(const IntMatrix& T, double s, int r);  // log phi^s(T^r)

struct FalconerOptions {
  int rMax = 32;
  double tol = 1e-8;
  bool strict = true;  // throw NonConvergence instead of flagging it
};

struct FalconerBounds {
  double v = 0, u = 0;
  double vHalf = 0, uHalf = 0;  // values at rMax / 2
  bool converged = true;
};

FalconerBounds falconer_bounds(const LabeledGraph& G, const IntMatrix& T, const FalconerOptions& opt = {});

struct PipelineConfig {
  std::vector<int> kGrid{1, 2, 3, 4};
  std::vector<Variant> variants{Variant::Lower};
  int rMax = 10;
  int rMin = 0;
  int graphR = 2;
  std::uint64_t seed = 0;
  bool parallel = true;
  PerturbOptions perturb;
  NeighborOptions neighbor;
  DeconOptions decon;
  BoxCountOptions boxcount;
  FalconerOptions falconer{32, 1e-8, false};
};

struct PerKRow {
  int k = 0;
  Variant variant = Variant::Lower;
  bool ok = false;
  std::string error;
  IntMatrix Tk;
  std::size_t digitCount = 0;     // q^k
  std::size_t distinctDigits = 0;
  bool exact = false;
  double boxDim = 0;              // box dimension of F_k
  double v = 0, u = 0;
  bool falconerConverged = true;
  bool graphStabilized = false;
  double wallMs = 0;
};

struct DimensionReport {
  IntMatrix T;
  std::vector<IntVec> A;
  bool stationary = false;        // level-1 perturbation already exact
  std::vector<PerKRow> rows;
  std::optional<BoxDimEstimate> boxF;
  std::string boxFError;
  double lastDelta = 0;           // |delta_last - delta_prev| over the lower variant
  double extrapolated = 0;
  int stabilizationK = -1;        // least grid k from which every row is stabilized
  bool partial = false;           // some row failed
};

DimensionReport dimension_pipeline(const IntMatrix& T, const std::vector<IntVec>& A, const PipelineConfig& cfg);

}  // namespace sadim
