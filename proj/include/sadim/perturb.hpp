#pragma once

#include "sadim/ifs.hpp"
#include "sadim/linalg.hpp"

namespace sadim {

enum class Variant { Lower, Upper };
const char* to_string(Variant v);

struct PerturbOptions {
  JordanOptions jordan;
  double snapTol = 1e-9;    // floating entries this close to an integer count as that integer
  double expandTol = 1e-9;
  std::size_t budget = kDefaultPointBudget;
};

// Signed ceiling: ceil(x) for x >= 0, -ceil(|x|) for x < 0. Signed floor swaps the roles.
std::int64_t signed_ceil(double x, double snapTol = 1e-9);
std::int64_t signed_floor(double x, double snapTol = 1e-9);
bool near_integer(double x, double snapTol = 1e-9);

Eigen::MatrixXd matrix_power(const Eigen::MatrixXd& J, int k);

IntMatrix perturb_matrix(const Eigen::MatrixXd& Jk, Variant v = Variant::Lower, double snapTol = 1e-9);

struct PerturbedDigits {
  std::vector<IntVec> digits;  // translated
  IntVec translation;
  std::vector<IntVec> raw() const;
};

// Rounds each digit, then translates by minus the lexicographically smallest
// rounded digit, so the zero vector is present.
PerturbedDigits perturb_digits(const std::vector<Eigen::VectorXd>& tildeAk, Variant v = Variant::Lower,
                               double snapTol = 1e-9);

struct PerturbedSystem {
  int k = 1;
  Variant variant = Variant::Lower;
  Eigen::MatrixXd Jk;
  IntMatrix Tk;
  std::vector<IntVec> Dk;  // indexed by multi-index, duplicates kept
  IntVec translation;
  std::vector<Eigen::VectorXd> tildeAk;
  JordanData jordan;
  bool exact = false;  // J^k and P^{-1}A_k were already integral

  std::vector<IntVec> rawDk() const;
  IntSystem system() const { return {Tk, Dk}; }
};

PerturbedSystem build_perturbation(const IntMatrix& T, const std::vector<IntVec>& A, int k,
                                   Variant v = Variant::Lower, const PerturbOptions& opt = {});
PerturbedSystem build_perturbation(const JordanData& jd, const IntMatrix& T, const std::vector<IntVec>& A, int k,
                                   Variant v, const PerturbOptions& opt);

struct DeflectionDiagnostics {
  int k = 0;
  int levels = 0;           // index-sequence length in original digits
  double sampleSup = 0;     // sup over paired points |x - x_k|
  double hausdorff = 0;     // between the two clouds
  double bound = 0;         // a-priori bound on the pairing distance
  double errorRadius = 0;   // truncation radius of the clouds
  std::size_t pairs = 0;
  bool sampled = false;
};

DeflectionDiagnostics deflection_diagnostics(const IntMatrix& T, const std::vector<IntVec>& A, int k, int depth,
                                             std::size_t samples = kDefaultPointBudget, std::uint64_t seed = 0,
                                             Variant v = Variant::Lower, const PerturbOptions& opt = {});

double hausdorff_distance(const std::vector<Eigen::VectorXd>& a, const std::vector<Eigen::VectorXd>& b);
double hausdorff_distance(const PointCloud& a, const PointCloud& b);

}  // namespace sadim
