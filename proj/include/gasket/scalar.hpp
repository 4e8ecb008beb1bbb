#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace gasket {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

struct Overflow : std::overflow_error {
  Overflow() : std::overflow_error("int64 overflow") {}
};

// Checked primitive arithmetic. The int64 overloads throw Overflow so callers
// can restart a computation in BigInt.
namespace arith {

inline std::int64_t add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw Overflow();
  return r;
}
inline std::int64_t sub(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_sub_overflow(a, b, &r)) throw Overflow();
  return r;
}
inline std::int64_t mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw Overflow();
  return r;
}
inline std::int64_t neg(std::int64_t a) {
  if (a == std::numeric_limits<std::int64_t>::min()) throw Overflow();
  return -a;
}
inline std::int64_t abs(std::int64_t a) { return a < 0 ? neg(a) : a; }
inline std::int64_t gcd(std::int64_t a, std::int64_t b) {
  a = abs(a);
  b = abs(b);
  while (b) {
    std::int64_t t = a % b;
    a = b;
    b = t;
  }
  return a;
}

inline BigInt add(const BigInt& a, const BigInt& b) { return a + b; }
inline BigInt sub(const BigInt& a, const BigInt& b) { return a - b; }
inline BigInt mul(const BigInt& a, const BigInt& b) { return a * b; }
inline BigInt neg(const BigInt& a) { return -a; }
inline BigInt abs(const BigInt& a) { return a < 0 ? BigInt(-a) : a; }
inline BigInt gcd(const BigInt& a, const BigInt& b) { return boost::multiprecision::gcd(a, b); }

}  // namespace arith

// a + b i over an integer-like component type.
template <class T>
struct Gaussian {
  T re{0};
  T im{0};

  Gaussian() = default;
  Gaussian(T r) : re(std::move(r)), im(0) {}
  Gaussian(T r, T i) : re(std::move(r)), im(std::move(i)) {}

  friend Gaussian operator+(const Gaussian& a, const Gaussian& b) {
    return {arith::add(a.re, b.re), arith::add(a.im, b.im)};
  }
  friend Gaussian operator-(const Gaussian& a, const Gaussian& b) {
    return {arith::sub(a.re, b.re), arith::sub(a.im, b.im)};
  }
  friend Gaussian operator*(const Gaussian& a, const Gaussian& b) {
    return {arith::sub(arith::mul(a.re, b.re), arith::mul(a.im, b.im)),
            arith::add(arith::mul(a.re, b.im), arith::mul(a.im, b.re))};
  }
  friend bool operator==(const Gaussian& a, const Gaussian& b) { return a.re == b.re && a.im == b.im; }
  friend bool operator!=(const Gaussian& a, const Gaussian& b) { return !(a == b); }

  Gaussian conj() const { return {re, arith::neg(im)}; }
  T norm_sq() const { return arith::add(arith::mul(re, re), arith::mul(im, im)); }
  bool is_real() const { return im == 0; }
};

// Exact scalar: a Gaussian rational. Integers, Gaussian integers and rationals
// are the special cases with unit denominator and/or zero imaginary part.
class ExactScalar {
 public:
  enum class Kind { Integer, GaussianInteger, Rational, GaussianRational };

  ExactScalar() = default;
  ExactScalar(long long v) : re_(v) {}
  ExactScalar(const BigInt& v) : re_(v) {}
  ExactScalar(Rational v) : re_(std::move(v)) {}
  ExactScalar(Rational re, Rational im) : re_(std::move(re)), im_(std::move(im)) {}

  static ExactScalar I() { return ExactScalar(Rational(0), Rational(1)); }

  const Rational& re() const { return re_; }
  const Rational& im() const { return im_; }

  bool is_real() const { return im_ == 0; }
  bool is_zero() const { return re_ == 0 && im_ == 0; }
  bool is_integral() const {
    return boost::multiprecision::denominator(re_) == 1 && boost::multiprecision::denominator(im_) == 1;
  }
  Kind kind() const {
    if (is_integral()) return is_real() ? Kind::Integer : Kind::GaussianInteger;
    return is_real() ? Kind::Rational : Kind::GaussianRational;
  }

  Rational norm_sq() const { return re_ * re_ + im_ * im_; }
  ExactScalar conj() const { return ExactScalar(re_, -im_); }

  friend ExactScalar operator+(const ExactScalar& a, const ExactScalar& b) {
    return ExactScalar(a.re_ + b.re_, a.im_ + b.im_);
  }
  friend ExactScalar operator-(const ExactScalar& a, const ExactScalar& b) {
    return ExactScalar(a.re_ - b.re_, a.im_ - b.im_);
  }
  friend ExactScalar operator-(const ExactScalar& a) { return ExactScalar(-a.re_, -a.im_); }
  friend ExactScalar operator*(const ExactScalar& a, const ExactScalar& b) {
    return ExactScalar(a.re_ * b.re_ - a.im_ * b.im_, a.re_ * b.im_ + a.im_ * b.re_);
  }
  friend ExactScalar operator/(const ExactScalar& a, const ExactScalar& b) {
    Rational d = b.norm_sq();
    if (d == 0) throw std::domain_error("division by zero");
    ExactScalar n = a * b.conj();
    return ExactScalar(n.re_ / d, n.im_ / d);
  }
  ExactScalar& operator+=(const ExactScalar& b) { return *this = *this + b; }
  ExactScalar& operator*=(const ExactScalar& b) { return *this = *this * b; }
  friend bool operator==(const ExactScalar& a, const ExactScalar& b) { return a.re_ == b.re_ && a.im_ == b.im_; }
  friend bool operator!=(const ExactScalar& a, const ExactScalar& b) { return !(a == b); }

  std::string str() const {
    if (is_real()) return re_.str();
    std::string s = re_ == 0 ? "" : re_.str();
    if (im_ >= 0 && !s.empty()) s += "+";
    if (im_ == 1) return s + "i";
    if (im_ == -1) return s + "-i";
    return s + im_.str() + "i";
  }

 private:
  Rational re_{0};
  Rational im_{0};
};

inline std::ostream& operator<<(std::ostream& os, const ExactScalar& s) { return os << s.str(); }

// "p", "p/q" or a plain decimal like "-1.25", all exact.
namespace detail {
// cpp_int reads a leading 0 as octal, so decimal digits are validated and zeros stripped first.
inline BigInt parse_decimal_int(std::string s) {
  bool neg = false;
  if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
    neg = s[0] == '-';
    s.erase(0, 1);
  }
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) throw std::invalid_argument("bad number");
  auto nz = s.find_first_not_of('0');
  BigInt v = nz == std::string::npos ? BigInt(0) : BigInt(s.substr(nz));
  return neg ? BigInt(-v) : v;
}
}  // namespace detail

inline Rational parse_rational(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("empty number");
  auto slash = s.find('/');
  auto dot = s.find('.');
  try {
    if (dot != std::string::npos && slash == std::string::npos) {
      std::string frac = s.substr(dot + 1);
      if (frac.find_first_not_of("0123456789") != std::string::npos) throw std::invalid_argument("bad number");
      std::string digits = s.substr(0, dot) + frac;
      BigInt den = 1;
      for (std::size_t k = 0; k < frac.size(); ++k) den *= 10;
      return Rational(detail::parse_decimal_int(digits), den);
    }
    if (slash == std::string::npos) return Rational(detail::parse_decimal_int(s));
    BigInt d = detail::parse_decimal_int(s.substr(slash + 1));
    if (d == 0) throw std::invalid_argument("zero denominator");
    if (d < 0) return Rational(BigInt(-detail::parse_decimal_int(s.substr(0, slash))), BigInt(-d));
    return Rational(detail::parse_decimal_int(s.substr(0, slash)), d);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(std::string(e.what()) + ": '" + s + "'");
  }
}

inline Rational rational_pow(const Rational& b, long long e) {
  if (e < 0) {
    if (b == 0) throw std::domain_error("0 to a negative power");
    return Rational(1) / rational_pow(b, -e);
  }
  Rational r(1), x(b);
  while (e) {
    if (e & 1) r *= x;
    x *= x;
    e >>= 1;
  }
  return r;
}

inline long double to_ld(const Rational& r) {
  // Ratio of two big integers; scale down to keep both in range.
  BigInt n = boost::multiprecision::numerator(r), d = boost::multiprecision::denominator(r);
  long long shift = 0;
  auto bits = [](const BigInt& x) -> long long { return x == 0 ? 0 : (long long)boost::multiprecision::msb(arith::abs(x)); };
  long long bn = bits(n), bd = bits(d);
  if (bn > 1000) {
    shift += bn - 1000;
    n >>= (unsigned)(bn - 1000);
  }
  if (bd > 1000) {
    shift -= bd - 1000;
    d >>= (unsigned)(bd - 1000);
  }
  return std::ldexp(n.convert_to<long double>() / d.convert_to<long double>(), (int)shift);
}

}  // namespace gasket
