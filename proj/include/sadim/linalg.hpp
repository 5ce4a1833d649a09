#pragma once

#include <complex>
#include <vector>

#include "sadim/common.hpp"

namespace sadim {

// Monic integer polynomial, coefficients in ascending order (coeffs[n] == 1).
struct Polynomial {
  std::vector<std::int64_t> coeffs;
  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
};

Polynomial char_poly(const IntMatrix& M);

// Exact evaluation p(M); true when the result is the zero matrix.
bool annihilates(const Polynomial& p, const IntMatrix& M);

struct EigenRoot {
  std::complex<double> value;
  int multiplicity = 1;
};

struct ComplexSpectrum {
  std::vector<EigenRoot> roots;  // sorted by (modulus, real, imag)
  double tolerance = 1e-9;
};

ComplexSpectrum eigenvalues(const IntMatrix& M, double tol = 1e-9);

// Roots of an integer polynomial with the same clustering rules.
ComplexSpectrum poly_roots(const Polynomial& p, double tol = 1e-9);

// Throws Indeterminate when some modulus sits in [1 - tol, 1 + tol].
bool is_expanding(const IntMatrix& M, double tol = 1e-9);

struct JordanBlock {
  std::complex<double> eigenvalue;  // imag > 0 for complex blocks
  double modulus = 0;
  int size = 1;           // chain length
  bool complex = false;   // 2x2 rotation-scaled diagonal entries
  int offset = 0;         // first row/column in J
  int dim() const { return complex ? 2 * size : size; }
};

struct JordanData {
  Eigen::MatrixXd J;
  Eigen::MatrixXd P;
  std::vector<JordanBlock> blocks;
  double latticeGap = 0;
  double residual = 0;  // ||P J P^-1 - M||_F
};

struct JordanOptions {
  double rankTol = 1e-8;
  double clusterTol = 1e-9;
};

JordanData real_jordan_form(const IntMatrix& M, const JordanOptions& opt = {});

// Minimal length of a nonzero vector of P^{-1} Z^n.
double lattice_gap(const Eigen::MatrixXd& P);

// c P with c the power of two closest to 1 (c <= 1) making the gap exceed n.
Eigen::MatrixXd rescale_basis(const Eigen::MatrixXd& P, int n);

// Strongly connected components of a digraph given by adjacency lists, in
// reverse topological order of the condensation.
std::vector<std::vector<int>> strongly_connected_components(const std::vector<std::vector<int>>& adj);

double spectral_radius(const IntMatrix& B, double tol = 1e-12);

}  // namespace sadim
