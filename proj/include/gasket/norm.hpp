#pragma once

#include "matrix.hpp"

#include <functional>
#include <numeric>
#include <optional>
#include <variant>

namespace gasket {

struct MaxAbs {};
struct RowSumInf {};
struct EntrySumL1 {};
// Curvature-type functional: sum_ij A_ij * w_i * v_j, i.e. w^T A v.
struct WeightedBilinear {
  std::vector<long long> v;
  std::vector<long long> w;
};

using NormFunctional = std::variant<MaxAbs, RowSumInf, EntrySumL1, WeightedBilinear>;

inline std::string norm_name(const NormFunctional& f) {
  struct V {
    std::string operator()(const MaxAbs&) const { return "maxabs"; }
    std::string operator()(const RowSumInf&) const { return "rowsum"; }
    std::string operator()(const EntrySumL1&) const { return "entrysum"; }
    std::string operator()(const WeightedBilinear&) const { return "bilinear"; }
  };
  return std::visit(V{}, f);
}

struct NormError : std::domain_error {
  using std::domain_error::domain_error;
};

// magnitude^(1/2 if squared) * scale
struct NormValue {
  Rational magnitude{0};
  bool squared{false};
  ScaleFactor scale;

  long double to_ld() const {
    long double m = gasket::to_ld(magnitude);
    if (squared) m = std::sqrt(m);
    return m * scale.to_ld();
  }
};

inline NormValue norm_eval(const NormFunctional& f, const ExactMatrix& m) {
  NormValue out;
  out.scale = m.scale();
  int n = m.n();
  if (std::holds_alternative<MaxAbs>(f)) {
    if (m.is_real()) {
      for (auto& x : m.entries()) out.magnitude = std::max(out.magnitude, Rational(abs(x.re())));
    } else {
      out.squared = true;
      for (auto& x : m.entries()) out.magnitude = std::max(out.magnitude, x.norm_sq());
    }
    return out;
  }
  if (!m.is_real()) throw NormError(norm_name(f) + " needs real entries");
  if (std::holds_alternative<RowSumInf>(f)) {
    for (int i = 0; i < n; ++i) {
      Rational s = 0;
      for (int j = 0; j < n; ++j) s += abs(m(i, j).re());
      out.magnitude = std::max(out.magnitude, s);
    }
    return out;
  }
  if (std::holds_alternative<EntrySumL1>(f)) {
    for (auto& x : m.entries()) out.magnitude += abs(x.re());
    return out;
  }
  const auto& wb = std::get<WeightedBilinear>(f);
  if ((int)wb.v.size() != n || (int)wb.w.size() != n) throw std::invalid_argument("weight length mismatch");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out.magnitude += m(i, j).re() * wb.w[i] * wb.v[j];
  if (out.magnitude <= 0) throw NormError("bilinear norm is not positive on " + m.str());
  return out;
}

enum class Cmp { Less, Equal, Greater };

inline Cmp compare(const Rational& a, const Rational& b) {
  return a < b ? Cmp::Less : (a == b ? Cmp::Equal : Cmp::Greater);
}

// Compare nv with base^exp. With a = 2 for squared magnitudes and
// scale = B^(E/D), the test M^(1/a) B^(E/D) ? T^q becomes
// M^D B^(E a) ? T^(q a D), all rational.
inline Cmp norm_cmp(const NormValue& nv, const Rational& base, long long exp) {
  if (base <= 0) throw std::invalid_argument("threshold base must be positive");
  long long a = nv.squared ? 2 : 1;
  long long D = nv.scale.exp_den, E = nv.scale.exp_num;
  Rational lhs = rational_pow(nv.magnitude, D);
  if (!nv.scale.is_identity()) lhs *= rational_pow(nv.scale.base, E * a);
  Rational rhs = rational_pow(base, exp * a * D);
  return compare(lhs, rhs);
}

inline Cmp norm_cmp(const NormValue& x, const NormValue& y) {
  // x^(2D) ... both raised to a common even power over the lcm of denominators.
  long long D = std::lcm(x.scale.exp_den, y.scale.exp_den);
  auto lift = [&](const NormValue& v) {
    long long a = v.squared ? 1 : 2;  // bring to squared magnitude
    Rational r = rational_pow(v.magnitude, a * D);
    if (!v.scale.is_identity()) r *= rational_pow(v.scale.base, 2 * v.scale.exp_num * (D / v.scale.exp_den));
    return r;
  };
  if (!x.scale.is_identity() && !y.scale.is_identity() && x.scale.base != y.scale.base) {
    long double a = x.to_ld(), b = y.to_ld();
    return a < b ? Cmp::Less : (a == b ? Cmp::Equal : Cmp::Greater);
  }
  return compare(lift(x), lift(y));
}

// Permutation sigma with m[i, sigma(i)] >= 1 for all i, by bipartite matching.
inline std::optional<std::vector<int>> dominating_permutation(const ExactMatrix& m) {
  int n = m.n();
  for (auto& x : m.entries())
    if (!x.is_real() || x.re() < 0) throw std::invalid_argument("dominating_permutation needs a nonnegative real matrix");
  std::vector<int> match_col(n, -1);  // column -> row
  std::vector<char> seen;
  std::function<bool(int)> augment = [&](int r) -> bool {
    for (int c = 0; c < n; ++c) {
      if (seen[c] || m(r, c).re() < 1) continue;
      seen[c] = 1;
      if (match_col[c] < 0 || augment(match_col[c])) {
        match_col[c] = r;
        return true;
      }
    }
    return false;
  };
  for (int r = 0; r < n; ++r) {
    seen.assign(n, 0);
    if (!augment(r)) return std::nullopt;
  }
  std::vector<int> sigma(n);
  for (int c = 0; c < n; ++c) sigma[match_col[c]] = c;
  return sigma;
}

}  // namespace gasket
