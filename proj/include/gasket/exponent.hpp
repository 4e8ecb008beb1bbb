#pragma once

#include "engine.hpp"
#include "zeta.hpp"

#include <functional>
#include <set>

namespace gasket {

struct ExponentEstimate {
  double slope{0};
  double stderr_{0};
  int p_min{0};
  int p_max{0};
};

// Least-squares slope of log N against log(base^p). Default window: upper half.
inline ExponentEstimate fit_exponent(const std::vector<std::pair<int, BigInt>>& rows, double base = 2,
                                     std::optional<std::pair<int, int>> window = std::nullopt) {
  std::vector<std::pair<int, BigInt>> use;
  if (window) {
    for (auto& r : rows)
      if (r.first >= window->first && r.first <= window->second) use.push_back(r);
  } else {
    std::size_t start = rows.size() / 2;
    use.assign(rows.begin() + (std::ptrdiff_t)start, rows.end());
  }
  if (use.size() < 3) throw std::invalid_argument("fit needs at least 3 rows in the window");
  std::vector<long double> x, y;
  for (auto& r : use) {
    if (r.second <= 0) throw std::invalid_argument("fit window contains a zero count");
    x.push_back(r.first * std::log((long double)base));
    y.push_back(std::log(to_ld(Rational(r.second))));
  }
  long double n = x.size(), mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  long double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0) throw std::invalid_argument("degenerate fit window");
  long double slope = sxy / sxx, icpt = my - slope * mx, ssr = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    long double r = y[i] - (icpt + slope * x[i]);
    ssr += r * r;
  }
  ExponentEstimate e;
  e.slope = (double)slope;
  e.stderr_ = x.size() > 2 ? (double)std::sqrt(ssr / (n - 2) / sxx) : 0.0;
  e.p_min = use.front().first;
  e.p_max = use.back().first;
  return e;
}

inline ExponentEstimate fit_exponent(const CountTable& t, std::optional<std::pair<int, int>> window = std::nullopt) {
  return fit_exponent(t.rows, (double)to_ld(t.base), window);
}

// Words h t^j W for j >= 1, minus the removed j.
struct QFamily {
  int head;
  int tail;
  MultiIndex suffix;
  std::set<long long> removed;
  TailModel model;
  // Unipotent2: A_h A_t^j A_W = P + j Q
  ExactMatrix P, Q;
};

struct QSeriesSet {
  Rational kappa;
  std::vector<QFamily> families;
};

struct Enclosure {
  long double lo{0};
  long double hi{0};
};

namespace detail {

inline ExactMatrix member_matrix(const GasketSpec& spec, const QFamily& f, long long j) {
  if (f.model.kind == TailModel::Kind::Unipotent2) {
    ExactScalar jj((long long)j);
    ExactMatrix r(f.P.n());
    for (int i = 0; i < r.n(); ++i)
      for (int k = 0; k < r.n(); ++k) r(i, k) = f.P(i, k) + f.Q(i, k) * jj;
    return r;
  }
  MultiIndex w{f.head};
  for (long long k = 0; k < j; ++k) w.push_back(f.tail);
  w.insert(w.end(), f.suffix.begin(), f.suffix.end());
  return word_matrix(spec.generators, w);
}

inline QFamily make_family(const GasketSpec& spec, int h, int t, MultiIndex suffix) {
  auto it = spec.tails.find({h, t});
  if (it == spec.tails.end())
    throw std::invalid_argument(spec.name + ": missing tail model for pair (" + std::to_string(h) + "," +
                                std::to_string(t) + ")");
  QFamily f{h, t, std::move(suffix), {}, it->second, {}, {}};
  if (f.model.kind == TailModel::Kind::Unipotent2) {
    const ExactMatrix& T = spec.generators[t - 1];
    ExactMatrix N = T;
    for (int i = 0; i < N.n(); ++i) N(i, i) = N(i, i) - ExactScalar(1);
    ExactMatrix AW = word_matrix(spec.generators, f.suffix);
    const ExactMatrix& H = spec.generators[h - 1];
    f.P = mat_mul(H, AW);
    f.Q = mat_mul(mat_mul(H, N), AW);
  }
  return f;
}

inline bool norm_le(const NormValue& v, const Rational& kappa) {
  if (kappa <= 0) return false;
  return norm_cmp(v, kappa, 1) != Cmp::Greater;
}

// Members j with norm <= kappa. Unipotent2 norms are affine in j entrywise, so
// past j0 = (kappa + |p|)/|q| for the steepest entry nothing qualifies.
inline std::vector<long long> small_members(const GasketSpec& spec, const QFamily& f, const Rational& kappa) {
  std::vector<long long> out;
  if (kappa <= 0) return out;
  long long jmax;
  if (f.model.kind == TailModel::Kind::Unipotent2) {
    long double best = -1;
    long double bp = 0;
    for (std::size_t e = 0; e < f.Q.entries().size(); ++e) {
      long double a = std::sqrt(to_ld(f.Q.entries()[e].norm_sq()));
      if (a > best) {
        best = a;
        bp = std::sqrt(to_ld(f.P.entries()[e].norm_sq()));
      }
    }
    if (best <= 0) throw std::invalid_argument(spec.name + ": constant family, not a gasket");
    jmax = (long long)std::ceil((to_ld(kappa) + bp) / best) + 2;
    for (long long j = 1; j <= jmax; ++j)
      if (norm_le(norm_eval(spec.norm, member_matrix(spec, f, j)), kappa)) out.push_back(j);
  } else {
    // Geometric growth: scan until 50 consecutive members exceed kappa.
    long long run = 0;
    for (long long j = 1; run < 50 && j < 100000; ++j) {
      if (norm_le(norm_eval(spec.norm, member_matrix(spec, f, j)), kappa)) {
        out.push_back(j);
        run = 0;
      } else {
        ++run;
      }
    }
  }
  return out;
}

}  // namespace detail

// Refine Q^0 = J^m: members with norm <= kappa are replaced by J^m . member
// until nothing with norm <= kappa is left.
inline QSeriesSet build_qset(const GasketSpec& spec, const Rational& kappa) {
  validate(spec);
  if (spec.has_scale()) throw std::invalid_argument(spec.name + ": series bounds need unscaled generators");
  if (!std::holds_alternative<MaxAbs>(spec.norm)) throw std::invalid_argument(spec.name + ": series bounds need MaxAbs");
  QSeriesSet q;
  q.kappa = kappa;
  for (int h = 1; h <= spec.m(); ++h)
    for (int t = 1; t <= spec.m(); ++t)
      if (h != t) q.families.push_back(detail::make_family(spec, h, t, {}));
  for (std::size_t i = 0; i < q.families.size(); ++i) {
    if (q.families.size() > 20000) throw std::runtime_error("series refinement does not stabilise");
    auto small = detail::small_members(spec, q.families[i], kappa);
    for (long long j : small) {
      q.families[i].removed.insert(j);
      MultiIndex w{q.families[i].head};
      for (long long k = 0; k < j; ++k) w.push_back(q.families[i].tail);
      w.insert(w.end(), q.families[i].suffix.begin(), q.families[i].suffix.end());
      for (int h = 1; h <= spec.m(); ++h)
        for (int t = 1; t <= spec.m(); ++t)
          if (h != t) q.families.push_back(detail::make_family(spec, h, t, w));
    }
  }
  return q;
}

namespace detail {

// Exact-then-float norms of the explicit members, plus the tail data.
struct FamilyPlan {
  std::vector<long double> norms;  // explicit members, removed ones skipped
  long long J1{0};
  // Unipotent2 tail: norm(j) in [a (j + xlo), a (j + xhi)] for j > J1
  long double a{0}, xlo{0}, xhi{0};
  // Geometric tail: norm(j) >= last * lambda^(j - J1)
  long double last{0}, lambda{0};
  bool geometric{false};
};

inline FamilyPlan plan_family(const GasketSpec& spec, const QFamily& f) {
  FamilyPlan p;
  long long maxrem = f.removed.empty() ? 0 : *f.removed.rbegin();
  if (f.model.kind == TailModel::Kind::Unipotent2) {
    // Steepest entries (|q| maximal, compared exactly) dominate for large j.
    Rational best = 0;
    for (auto& q : f.Q.entries()) best = std::max(best, q.norm_sq());
    if (best == 0) throw std::invalid_argument(spec.name + ": constant family");
    p.a = std::sqrt(to_ld(best));
    std::vector<std::size_t> top;
    for (std::size_t e = 0; e < f.Q.entries().size(); ++e)
      if (f.Q.entries()[e].norm_sq() == best) top.push_back(e);
    // z = p/q per top entry
    std::vector<std::pair<long double, long double>> zs;
    for (auto e : top) {
      ExactScalar z = f.P.entries()[e] / f.Q.entries()[e];
      zs.push_back({to_ld(z.re()), to_ld(z.im())});
    }
    long double xlo = -1e300L;
    for (auto& z : zs) xlo = std::max(xlo, z.first);
    long long J1 = std::max<long long>(64, maxrem + 1);
    for (;; J1 *= 2) {
      bool ok = J1 + 1 + xlo > 1;
      for (std::size_t e = 0; ok && e < f.Q.entries().size(); ++e) {
        if (f.Q.entries()[e].norm_sq() == best) continue;
        long double ae = std::sqrt(to_ld(f.Q.entries()[e].norm_sq()));
        long double be = std::sqrt(to_ld(f.P.entries()[e].norm_sq()));
        // ae j + be <= a (j + xlo) for all j > J1
        if ((p.a - ae) * (J1 + 1) * (1 - 1e-15L) < be - p.a * xlo + 1e-12L) ok = false;
      }
      if (ok) break;
      if (J1 > (1LL << 40)) throw std::runtime_error("tail crossover not found");
    }
    p.J1 = J1;
    p.xlo = xlo;
    long double xhi = -1e300L;
    for (auto& z : zs) {
      long double d = z.second == 0 ? 0 : z.second * z.second / (2 * (J1 + 1 + z.first));
      xhi = std::max(xhi, z.first + d);
    }
    p.xhi = xhi;
    for (long long j = 1; j <= J1; ++j) {
      if (f.removed.count(j)) continue;
      p.norms.push_back(norm_eval(spec.norm, member_matrix(spec, f, j)).to_ld());
    }
    return p;
  }
  p.geometric = true;
  if (!(f.model.lambda > 1)) throw std::invalid_argument(spec.name + ": geometric tail needs lambda > 1");
  p.lambda = to_ld(f.model.lambda);
  long long J1 = std::max<long long>(40, maxrem + 1);
  MultiIndex w{f.head};
  for (long long k = 0; k < J1; ++k) w.push_back(f.tail);
  w.insert(w.end(), f.suffix.begin(), f.suffix.end());
  // explicit terms j = 1..J1
  ExactMatrix acc = word_matrix(spec.generators, f.suffix);
  std::vector<NormValue> nv;
  const ExactMatrix& T = spec.generators[f.tail - 1];
  const ExactMatrix& H = spec.generators[f.head - 1];
  for (long long j = 1; j <= J1 + 50; ++j) {
    acc = mat_mul(T, acc);
    nv.push_back(norm_eval(spec.norm, mat_mul(H, acc)));
  }
  for (long long j = 1; j <= J1; ++j)
    if (!f.removed.count(j)) p.norms.push_back(nv[j - 1].to_ld());
  // validate ratio >= lambda on the 50 terms after J1, exactly
  for (long long j = J1; j < J1 + 50; ++j) {
    NormValue lhs = nv[j - 1];
    lhs.magnitude *= nv[j - 1].squared ? f.model.lambda * f.model.lambda : f.model.lambda;
    if (norm_cmp(lhs, nv[j]) == Cmp::Greater)
      throw std::runtime_error(spec.name + ": geometric ratio validation failed");
  }
  p.J1 = J1;
  p.last = nv[J1 - 1].to_ld();
  return p;
}

inline Enclosure eval_plan(const FamilyPlan& p, long double s) {
  Enclosure e;
  long double sum = 0, comp = 0;
  for (long double x : p.norms) {
    long double t = std::pow(x, -s), y = sum + t;
    comp += std::fabs(sum) >= std::fabs(t) ? (sum - y) + t : (t - y) + sum;
    sum = y;
  }
  sum += comp;
  long double slack = sum * 64 * std::numeric_limits<long double>::epsilon() * (1 + p.norms.size());
  e.lo = sum - slack;
  e.hi = sum + slack;
  if (p.geometric) {
    long double r = std::pow(p.lambda, -s);
    e.hi += std::pow(p.last, -s) * r / (1 - r);
    return e;
  }
  if (!(s > 1)) throw std::domain_error("series diverges for s <= 1");
  long double as = std::pow(p.a, -s);
  ZetaValue lo = hurwitz_zeta_em(s, (long double)p.J1 + 1 + p.xhi);
  ZetaValue hi = hurwitz_zeta_em(s, (long double)p.J1 + 1 + p.xlo);
  e.lo += as * (lo.value - lo.error);
  e.hi += as * (hi.value + hi.error);
  return e;
}

}  // namespace detail

// mu(s) over a refined Q-set, with g = n^(-s) mu and f = c^(-s) mu.
class MuSeries {
 public:
  MuSeries(const GasketSpec& spec, const Rational& kappa) : qset_(build_qset(spec, kappa)), n_(spec.n()) {
    for (auto& f : qset_.families) {
      plans_.push_back(detail::plan_family(spec, f));
      unipotent_ = unipotent_ || f.model.kind == TailModel::Kind::Unipotent2;
    }
  }

  Enclosure mu(long double s) const {
    Enclosure e;
    for (auto& p : plans_) {
      Enclosure x = detail::eval_plan(p, s);
      e.lo += x.lo;
      e.hi += x.hi;
    }
    return e;
  }
  Enclosure g(long double s) const { return scaled(std::pow((long double)n_, -s), mu(s)); }
  Enclosure f(long double s, long double c) const { return scaled(std::pow(c, -s), mu(s)); }

  long double convergence_abscissa() const { return unipotent_ ? 1.0L : 0.0L; }
  const QSeriesSet& qset() const { return qset_; }
  long long truncation_terms() const {
    long long t = 0;
    for (auto& p : plans_) t += (long long)p.norms.size();
    return t;
  }

 private:
  static Enclosure scaled(long double k, Enclosure e) { return {k * e.lo, k * e.hi}; }
  QSeriesSet qset_;
  int n_;
  std::vector<detail::FamilyPlan> plans_;
  bool unipotent_{false};
};

struct MuBounds {
  Enclosure mu, g, f;
};

inline MuBounds mu_bounds(const GasketSpec& spec, const Rational& kappa, long double s,
                          std::optional<Rational> c = std::nullopt) {
  MuSeries ms(spec, kappa);
  if (s <= ms.convergence_abscissa()) throw std::domain_error("s outside the convergence region");
  Rational cc = c ? *c : spec.coefficient.value_or(Rational(1));
  return {ms.mu(s), ms.g(s), ms.f(s, to_ld(cc))};
}

struct BoundInterval {
  double s_lower{0};
  double s_upper{std::numeric_limits<double>::infinity()};
  Rational kappa;
  long long truncation_terms{0};
  double tail_bound_width{0};
  int families{0};
};

// Root of a decreasing function h(s) = 1 on (a, b].
inline std::optional<long double> bisect_decreasing(const std::function<long double(long double)>& h, long double a,
                                                    long double b, int iters = 200) {
  long double ha = h(a), hb = h(b);
  if (!(ha > 1) || !(hb < 1)) return std::nullopt;
  for (int i = 0; i < iters && b - a > 1e-15L * std::max<long double>(1, b); ++i) {
    long double mid = (a + b) / 2;
    if (h(mid) > 1)
      a = mid;
    else
      b = mid;
  }
  return (a + b) / 2;
}

inline BoundInterval bound_exponent(const GasketSpec& spec, const Rational& kappa, const Rational& c) {
  if (!(c > 0 && c <= 1)) throw std::invalid_argument("coefficient must be in (0, 1]");
  MuSeries ms(spec, kappa);
  long double a = ms.convergence_abscissa() + 1e-9L, b = 64;
  long double cl = to_ld(c);
  auto lo = bisect_decreasing([&](long double s) { return ms.g(s).lo; }, a, b);
  if (!lo) throw std::runtime_error("no sign change for the lower bound function");
  BoundInterval out;
  out.s_lower = (double)*lo;
  auto hi = bisect_decreasing([&](long double s) { return ms.f(s, cl).hi; }, a, b);
  if (hi) out.s_upper = (double)*hi;
  out.kappa = kappa;
  out.truncation_terms = ms.truncation_terms();
  Enclosure m = ms.mu(*lo);
  out.tail_bound_width = (double)(m.hi - m.lo);
  out.families = (int)ms.qset().families.size();
  return out;
}

struct XiResult {
  double root{0};
  std::vector<std::pair<int, double>> sequence;  // (k, root_k)
};

// Root of s -> level_sum(k, s)^(1/k) = 1 for k = min(4, kmax)..kmax.
inline XiResult xi_root(const GasketSpec& spec, int kmax, double s_lo = 0, double s_hi = 16,
                        const EngineOptions& opt = {}) {
  if (kmax < 1) throw std::invalid_argument("kmax must be >= 1");
  XiResult r;
  for (int k = std::min(4, kmax); k <= kmax; ++k) {
    auto norms = level_norms(spec, k, opt);
    auto xi = [&](long double s) { return std::pow(power_sum(norms, s), 1.0L / k); };
    auto root = bisect_decreasing(xi, s_lo, s_hi);
    if (!root) throw std::runtime_error("xi: no bracketing root in [" + std::to_string(s_lo) + "," + std::to_string(s_hi) + "]");
    r.sequence.push_back({k, (double)*root});
  }
  r.root = r.sequence.back().second;
  return r;
}

struct ClosedFormFamily {
  enum class Kind { TriangularRho, AffineSab, FL1, FL2 };
  Kind kind;
  std::vector<long double> rho;
  long double a{0}, b{0};

  static ClosedFormFamily triangular(std::vector<long double> r) { return {Kind::TriangularRho, std::move(r), 0, 0}; }
  static ClosedFormFamily affine(long double a, long double b) { return {Kind::AffineSab, {}, a, b}; }
  static ClosedFormFamily fl1(long double a, long double b) { return {Kind::FL1, {}, a, b}; }
  static ClosedFormFamily fl2(long double a) { return {Kind::FL2, {}, a, 0}; }

  long double lhs(long double s) const {
    switch (kind) {
      case Kind::TriangularRho: {
        long double t = 0;
        for (auto r : rho) t += std::pow(r, -s);
        return t;
      }
      case Kind::AffineSab:
        return std::pow(1 - a, 2 * s / 3) + std::pow(a * b, s / 3) + std::pow(a * (1 - b), s / 3);
      case Kind::FL1:
        return std::pow(1 - a, s) + a * std::pow(b, s - 1) + a * std::pow(1 - b, s - 1);
      case Kind::FL2:
        return std::pow(1 - a, s) + std::pow(a, s - 1);
    }
    return 0;
  }

  void check_domain() const {
    auto open01 = [](long double x) { return x > 0 && x < 1; };
    switch (kind) {
      case Kind::TriangularRho:
        if (rho.empty()) throw std::invalid_argument("triangular family needs rho values");
        for (auto r : rho)
          if (!(r > 1)) throw std::invalid_argument("triangular family needs rho > 1");
        break;
      case Kind::AffineSab:
      case Kind::FL1:
        if (!open01(a) || !open01(b)) throw std::invalid_argument("parameters must lie in (0,1)");
        break;
      case Kind::FL2:
        if (!open01(a)) throw std::invalid_argument("parameter must lie in (0,1)");
        break;
    }
  }
};

struct ClosedFormRoot {
  double root;
  double residual;
};

inline ClosedFormRoot solve_closed_form(const ClosedFormFamily& fam) {
  fam.check_domain();
  auto h = [&](long double s) { return fam.lhs(s); };
  auto r = bisect_decreasing(h, 1e-12L, 8.0L, 400);
  if (!r) throw std::runtime_error("no root in (0, 8]");
  return {(double)*r, (double)std::fabs(fam.lhs(*r) - 1)};
}

}  // namespace gasket
