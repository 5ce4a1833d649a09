#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace sadim {

using IntVec = std::vector<std::int64_t>;

enum class ErrorKind {
  NonConvergence,
  Indeterminate,
  IllConditioned,
  SizeLimit,
  NotExpanding,
  EmptyCloud,
  UnsupportedShape,
  NotPrimitive,
  ModuliNotOrdered,
  DigitsOutOfRange,
  InvalidInput,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Square integer matrix, row-major. Arithmetic is overflow-checked.
class IntMatrix {
 public:
  IntMatrix() = default;
  explicit IntMatrix(int n) : n_(n), a_(static_cast<size_t>(n) * n, 0) {}
  IntMatrix(std::initializer_list<std::initializer_list<std::int64_t>> rows);
  static IntMatrix identity(int n);
  static IntMatrix diagonal(const IntVec& d);
  static IntMatrix from_rows(const std::vector<IntVec>& rows);

  int size() const { return n_; }
  std::int64_t& operator()(int i, int j) { return a_[static_cast<size_t>(i) * n_ + j]; }
  std::int64_t operator()(int i, int j) const { return a_[static_cast<size_t>(i) * n_ + j]; }
  bool operator==(const IntMatrix& o) const { return n_ == o.n_ && a_ == o.a_; }
  bool operator!=(const IntMatrix& o) const { return !(*this == o); }

  IntMatrix operator*(const IntMatrix& o) const;
  IntMatrix operator+(const IntMatrix& o) const;
  IntMatrix operator-(const IntMatrix& o) const;
  IntVec apply(const IntVec& v) const;
  IntMatrix pow(int k) const;
  IntMatrix transposed() const;
  IntMatrix permuted(const std::vector<int>& order) const;  // rows/cols reordered

  // Exact determinant and adjugate (fraction-free elimination).
  std::int64_t det() const;
  IntMatrix adjugate() const;

  bool is_nonnegative() const;
  Eigen::MatrixXd to_eigen() const;
  std::vector<IntVec> rows() const;

 private:
  int n_ = 0;
  std::vector<std::int64_t> a_;
};

std::int64_t checked_add(std::int64_t a, std::int64_t b);
std::int64_t checked_mul(std::int64_t a, std::int64_t b);

IntVec operator+(const IntVec& a, const IntVec& b);
IntVec operator-(const IntVec& a, const IntVec& b);
IntVec operator-(const IntVec& a);
double norm2(const IntVec& v);
Eigen::VectorXd to_eigen(const IntVec& v);

struct IntVecHash {
  size_t operator()(const IntVec& v) const noexcept;
};

// Dedupe preserving first-occurrence order.
std::vector<IntVec> distinct(const std::vector<IntVec>& v);

// An integral system F(T, A).
struct IntSystem {
  IntMatrix T;
  std::vector<IntVec> A;
  int dim() const { return T.size(); }
  void validate() const;
};

// A real affine system F(T, A), used for the real Jordan picture.
struct RealSystem {
  Eigen::MatrixXd T;
  std::vector<Eigen::VectorXd> A;
  int dim() const { return static_cast<int>(T.rows()); }
  static RealSystem from(const IntSystem& s);
};

std::int64_t ipow(std::int64_t base, int e);

}  // namespace sadim
