#pragma once

#include "scalar.hpp"

#include <complex>
#include <initializer_list>
#include <sstream>
#include <vector>

namespace gasket {

// base^(exp_num/exp_den)
struct ScaleFactor {
  Rational base{1};
  long long exp_num{0};
  long long exp_den{1};

  ScaleFactor() = default;
  ScaleFactor(Rational b, long long num, long long den) : base(std::move(b)), exp_num(num), exp_den(den) {
    if (base <= 0) throw std::invalid_argument("scale base must be positive");
    if (exp_den <= 0) throw std::invalid_argument("scale exponent denominator must be positive");
    normalize();
  }

  bool is_identity() const { return exp_num == 0 || base == 1; }

  // Same base and denominator, so exponents add.
  bool compatible(const ScaleFactor& o) const {
    return is_identity() || o.is_identity() || (base == o.base && exp_den == o.exp_den);
  }

  ScaleFactor operator*(const ScaleFactor& o) const {
    if (is_identity()) return o;
    if (o.is_identity()) return *this;
    if (!compatible(o)) throw std::invalid_argument("incompatible scale bases");
    return ScaleFactor(base, exp_num + o.exp_num, exp_den);
  }

  ScaleFactor pow(long long k) const {
    if (is_identity() || k == 0) return {};
    return ScaleFactor(base, exp_num * k, exp_den);
  }

  long double to_ld() const {
    if (is_identity()) return 1.0L;
    return std::pow(gasket::to_ld(base), (long double)exp_num / (long double)exp_den);
  }

  friend bool operator==(const ScaleFactor& a, const ScaleFactor& b) {
    if (a.is_identity() && b.is_identity()) return true;
    return a.base == b.base && a.exp_num * b.exp_den == b.exp_num * a.exp_den;
  }

  std::string str() const {
    if (is_identity()) return "1";
    std::ostringstream os;
    os << base.str() << "^(" << exp_num << "/" << exp_den << ")";
    return os.str();
  }

 private:
  void normalize() {
    if (exp_num == 0 || base == 1) {
      base = 1;
      exp_num = 0;
      exp_den = 1;
    }
  }
};

// True matrix = scale * entries.
class ExactMatrix {
 public:
  ExactMatrix() = default;
  explicit ExactMatrix(int n) : n_(n), a_(std::size_t(n) * n) {
    if (n < 1) throw std::invalid_argument("matrix dimension must be >= 1");
  }
  ExactMatrix(int n, std::vector<ExactScalar> entries, ScaleFactor scale = {})
      : n_(n), a_(std::move(entries)), scale_(std::move(scale)) {
    if (n < 1 || a_.size() != std::size_t(n) * n) throw std::invalid_argument("matrix must be square");
  }
  ExactMatrix(std::initializer_list<std::initializer_list<ExactScalar>> rows, ScaleFactor scale = {})
      : n_((int)rows.size()), scale_(std::move(scale)) {
    for (auto& r : rows) {
      if ((int)r.size() != n_) throw std::invalid_argument("matrix must be square");
      for (auto& x : r) a_.push_back(x);
    }
    if (n_ < 1) throw std::invalid_argument("matrix dimension must be >= 1");
  }

  static ExactMatrix identity(int n) {
    ExactMatrix m(n);
    for (int i = 0; i < n; ++i) m(i, i) = ExactScalar(1);
    return m;
  }

  int n() const { return n_; }
  ExactScalar& operator()(int i, int j) { return a_[std::size_t(i) * n_ + j]; }
  const ExactScalar& operator()(int i, int j) const { return a_[std::size_t(i) * n_ + j]; }
  const std::vector<ExactScalar>& entries() const { return a_; }
  const ScaleFactor& scale() const { return scale_; }
  void set_scale(ScaleFactor s) { scale_ = std::move(s); }

  bool is_real() const {
    for (auto& x : a_)
      if (!x.is_real()) return false;
    return true;
  }
  bool is_integral() const {
    for (auto& x : a_)
      if (!x.is_integral()) return false;
    return true;
  }
  bool is_nonnegative() const {
    for (auto& x : a_)
      if (!x.is_real() || x.re() < 0) return false;
    return true;
  }

  ExactMatrix transpose() const {
    ExactMatrix t(n_);
    t.scale_ = scale_;
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) t(i, j) = (*this)(j, i);
    return t;
  }

  // Determinant of the entry matrix (scale not applied).
  ExactScalar entry_det() const {
    std::vector<ExactScalar> m = a_;
    int n = n_;
    ExactScalar det(1);
    for (int c = 0; c < n; ++c) {
      int p = -1;
      for (int r = c; r < n; ++r)
        if (!m[r * n + c].is_zero()) {
          p = r;
          break;
        }
      if (p < 0) return ExactScalar(0);
      if (p != c) {
        for (int k = 0; k < n; ++k) std::swap(m[p * n + k], m[c * n + k]);
        det = -det;
      }
      det *= m[c * n + c];
      for (int r = c + 1; r < n; ++r) {
        ExactScalar f = m[r * n + c] / m[c * n + c];
        for (int k = c; k < n; ++k) m[r * n + k] = m[r * n + k] - f * m[c * n + k];
      }
    }
    return det;
  }

  std::vector<std::complex<long double>> to_complex() const {
    long double s = scale_.to_ld();
    std::vector<std::complex<long double>> out;
    out.reserve(a_.size());
    for (auto& x : a_) out.emplace_back(s * to_ld(x.re()), s * to_ld(x.im()));
    return out;
  }

  friend bool operator==(const ExactMatrix& a, const ExactMatrix& b) {
    return a.n_ == b.n_ && a.a_ == b.a_ && a.scale_ == b.scale_;
  }

  std::string str() const {
    std::ostringstream os;
    if (!scale_.is_identity()) os << scale_.str() << "*";
    os << "[";
    for (int i = 0; i < n_; ++i) {
      os << (i ? ",[" : "[");
      for (int j = 0; j < n_; ++j) os << (j ? "," : "") << (*this)(i, j).str();
      os << "]";
    }
    os << "]";
    return os.str();
  }

 private:
  int n_{0};
  std::vector<ExactScalar> a_;
  ScaleFactor scale_;
};

inline ExactMatrix mat_mul(const ExactMatrix& a, const ExactMatrix& b) {
  if (a.n() != b.n()) throw std::invalid_argument("dimension mismatch");
  ScaleFactor s = a.scale() * b.scale();
  int n = a.n();
  ExactMatrix c(n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      const ExactScalar& x = a(i, k);
      if (x.is_zero()) continue;
      for (int j = 0; j < n; ++j) c(i, j) += x * b(k, j);
    }
  c.set_scale(s);
  return c;
}

inline ExactMatrix operator*(const ExactMatrix& a, const ExactMatrix& b) { return mat_mul(a, b); }

// A_I = A_{i1} ... A_{ik}; symbols are 1-based generator indices.
inline ExactMatrix word_matrix(const std::vector<ExactMatrix>& gens, const std::vector<int>& word) {
  if (gens.empty()) throw std::invalid_argument("no generators");
  ExactMatrix m = ExactMatrix::identity(gens[0].n());
  for (int s : word) m = mat_mul(m, gens.at(std::size_t(s - 1)));
  return m;
}

}  // namespace gasket
