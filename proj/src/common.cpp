#include "sadim/common.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

#include <boost/multiprecision/cpp_int.hpp>

namespace sadim {

using boost::multiprecision::cpp_int;

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::Indeterminate: return "Indeterminate";
    case ErrorKind::IllConditioned: return "IllConditioned";
    case ErrorKind::SizeLimit: return "SizeLimit";
    case ErrorKind::NotExpanding: return "NotExpanding";
    case ErrorKind::EmptyCloud: return "EmptyCloud";
    case ErrorKind::UnsupportedShape: return "UnsupportedShape";
    case ErrorKind::NotPrimitive: return "NotPrimitive";
    case ErrorKind::ModuliNotOrdered: return "ModuliNotOrdered";
    case ErrorKind::DigitsOutOfRange: return "DigitsOutOfRange";
    case ErrorKind::InvalidInput: return "InvalidInput";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw Error(ErrorKind::SizeLimit, "integer overflow");
  return r;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw Error(ErrorKind::SizeLimit, "integer overflow");
  return r;
}

std::int64_t ipow(std::int64_t base, int e) {
  std::int64_t r = 1;
  for (int i = 0; i < e; ++i) r = checked_mul(r, base);
  return r;
}

IntMatrix::IntMatrix(std::initializer_list<std::initializer_list<std::int64_t>> rows)
    : n_(static_cast<int>(rows.size())) {
  for (const auto& r : rows) {
    if (static_cast<int>(r.size()) != n_) throw Error(ErrorKind::InvalidInput, "matrix not square");
    a_.insert(a_.end(), r.begin(), r.end());
  }
}

IntMatrix IntMatrix::identity(int n) {
  IntMatrix m(n);
  for (int i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

IntMatrix IntMatrix::diagonal(const IntVec& d) {
  IntMatrix m(static_cast<int>(d.size()));
  for (size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

IntMatrix IntMatrix::from_rows(const std::vector<IntVec>& rows) {
  IntMatrix m(static_cast<int>(rows.size()));
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.size()) throw Error(ErrorKind::InvalidInput, "matrix not square");
    for (size_t j = 0; j < rows.size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

IntMatrix IntMatrix::operator*(const IntMatrix& o) const {
  IntMatrix r(n_);
  for (int i = 0; i < n_; ++i)
    for (int k = 0; k < n_; ++k) {
      std::int64_t v = (*this)(i, k);
      if (v == 0) continue;
      for (int j = 0; j < n_; ++j) r(i, j) = checked_add(r(i, j), checked_mul(v, o(k, j)));
    }
  return r;
}

IntMatrix IntMatrix::operator+(const IntMatrix& o) const {
  IntMatrix r(n_);
  for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = checked_add(a_[i], o.a_[i]);
  return r;
}

IntMatrix IntMatrix::operator-(const IntMatrix& o) const {
  IntMatrix r(n_);
  for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = checked_add(a_[i], -o.a_[i]);
  return r;
}

IntVec IntMatrix::apply(const IntVec& v) const {
  IntVec r(n_, 0);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) r[i] = checked_add(r[i], checked_mul((*this)(i, j), v[j]));
  return r;
}

IntMatrix IntMatrix::pow(int k) const {
  IntMatrix r = identity(n_);
  IntMatrix b = *this;
  while (k > 0) {
    if (k & 1) r = r * b;
    k >>= 1;
    if (k) b = b * b;
  }
  return r;
}

IntMatrix IntMatrix::transposed() const {
  IntMatrix r(n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) r(j, i) = (*this)(i, j);
  return r;
}

IntMatrix IntMatrix::permuted(const std::vector<int>& order) const {
  IntMatrix r(n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) r(i, j) = (*this)(order[i], order[j]);
  return r;
}

namespace {

cpp_int bareiss_det(std::vector<std::vector<cpp_int>> m) {
  const int n = static_cast<int>(m.size());
  if (n == 0) return 1;
  cpp_int sign = 1, prev = 1;
  for (int k = 0; k < n - 1; ++k) {
    if (m[k][k] == 0) {
      int p = k + 1;
      while (p < n && m[p][k] == 0) ++p;
      if (p == n) return 0;
      std::swap(m[k], m[p]);
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i)
      for (int j = k + 1; j < n; ++j) m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
    prev = m[k][k];
  }
  return sign * m[n - 1][n - 1];
}

std::int64_t to_i64(const cpp_int& v) {
  if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min())
    throw Error(ErrorKind::SizeLimit, "integer overflow");
  return static_cast<std::int64_t>(v);
}

}  // namespace

std::int64_t IntMatrix::det() const {
  std::vector<std::vector<cpp_int>> m(n_, std::vector<cpp_int>(n_));
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) m[i][j] = (*this)(i, j);
  return to_i64(bareiss_det(std::move(m)));
}

IntMatrix IntMatrix::adjugate() const {
  IntMatrix r(n_);
  if (n_ == 1) {
    r(0, 0) = 1;
    return r;
  }
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) {
      std::vector<std::vector<cpp_int>> minor;
      for (int a = 0; a < n_; ++a) {
        if (a == j) continue;
        std::vector<cpp_int> row;
        for (int b = 0; b < n_; ++b)
          if (b != i) row.push_back((*this)(a, b));
        minor.push_back(std::move(row));
      }
      cpp_int c = bareiss_det(std::move(minor));
      r(i, j) = to_i64(((i + j) % 2 == 0) ? c : cpp_int(-c));
    }
  return r;
}

bool IntMatrix::is_nonnegative() const {
  return std::all_of(a_.begin(), a_.end(), [](std::int64_t v) { return v >= 0; });
}

Eigen::MatrixXd IntMatrix::to_eigen() const {
  Eigen::MatrixXd m(n_, n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) m(i, j) = static_cast<double>((*this)(i, j));
  return m;
}

std::vector<IntVec> IntMatrix::rows() const {
  std::vector<IntVec> r(n_, IntVec(n_));
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) r[i][j] = (*this)(i, j);
  return r;
}

IntVec operator+(const IntVec& a, const IntVec& b) {
  IntVec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = checked_add(a[i], b[i]);
  return r;
}

IntVec operator-(const IntVec& a, const IntVec& b) {
  IntVec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = checked_add(a[i], -b[i]);
  return r;
}

IntVec operator-(const IntVec& a) {
  IntVec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = -a[i];
  return r;
}

double norm2(const IntVec& v) {
  double s = 0;
  for (auto x : v) s += static_cast<double>(x) * static_cast<double>(x);
  return std::sqrt(s);
}

Eigen::VectorXd to_eigen(const IntVec& v) {
  Eigen::VectorXd r(v.size());
  for (size_t i = 0; i < v.size(); ++i) r[i] = static_cast<double>(v[i]);
  return r;
}

size_t IntVecHash::operator()(const IntVec& v) const noexcept {
  std::uint64_t h = 1469598103934665603ull;
  for (auto x : v) {
    h ^= static_cast<std::uint64_t>(x) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    h *= 1099511628211ull;
  }
  return static_cast<size_t>(h);
}

std::vector<IntVec> distinct(const std::vector<IntVec>& v) {
  std::unordered_set<IntVec, IntVecHash> seen;
  std::vector<IntVec> out;
  for (const auto& x : v)
    if (seen.insert(x).second) out.push_back(x);
  return out;
}

void IntSystem::validate() const {
  const int n = T.size();
  if (n <= 0) throw Error(ErrorKind::InvalidInput, "empty matrix");
  if (A.empty()) throw Error(ErrorKind::InvalidInput, "empty digit set");
  for (const auto& a : A)
    if (static_cast<int>(a.size()) != n)
      throw Error(ErrorKind::InvalidInput, "digit dimension does not match matrix size");
}

RealSystem RealSystem::from(const IntSystem& s) {
  RealSystem r;
  r.T = s.T.to_eigen();
  for (const auto& a : s.A) r.A.push_back(to_eigen(a));
  return r;
}

}  // namespace sadim
