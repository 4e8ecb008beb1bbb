#pragma once

#include "engine.hpp"
#include "spec.hpp"

#include <array>
#include <atomic>
#include <cmath>
#include <complex>
#include <functional>
#include <mutex>
#include <thread>

namespace gasket {

using cld = std::complex<long double>;

// Real chart: y = frame * x, coordinates y_k / y_d for k != d.
struct RealAffine {
  int denominator{0};
  int n{3};
  std::vector<long double> frame;  // row-major n*n, empty = identity
};
// w = 1 on CP^1, z = x0 / x1.
struct ComplexAffine {};

using Chart = std::variant<RealAffine, ComplexAffine>;

// The chart used for the real Sierpinski family: coordinates x_k / sum(x), k < n-1.
// The triangle has vertices [e_1] = (1,0), [e_2] = (0,1), [e_n] = (0,0).
inline RealAffine simplex_chart(int n) {
  RealAffine c{n - 1, n, std::vector<long double>(std::size_t(n) * n, 0)};
  for (int i = 0; i < n; ++i) {
    c.frame[std::size_t(i) * n + i] = 1;
    c.frame[std::size_t(n - 1) * n + i] = 1;
  }
  return c;
}

struct ChartError : std::domain_error {
  using std::domain_error::domain_error;
};

// Chart coordinates. Complex points use (re, im).
struct ProjPoint {
  std::vector<long double> x;
};

namespace detail {

inline int chart_dim(const Chart& c) {
  if (auto* r = std::get_if<RealAffine>(&c)) return r->n;
  return 2;
}

inline void check_chart(const Chart& c) {
  if (auto* r = std::get_if<RealAffine>(&c)) {
    if (r->n < 2 || r->denominator < 0 || r->denominator >= r->n) throw std::invalid_argument("bad chart denominator");
    if (!r->frame.empty() && r->frame.size() != std::size_t(r->n) * r->n) throw std::invalid_argument("bad chart frame");
  }
}

// Inverse of a small dense matrix, Gauss-Jordan with partial pivoting.
inline std::vector<long double> invert(std::vector<long double> a, int n) {
  std::vector<long double> inv(std::size_t(n) * n, 0);
  for (int i = 0; i < n; ++i) inv[std::size_t(i) * n + i] = 1;
  for (int c = 0; c < n; ++c) {
    int p = c;
    for (int r = c + 1; r < n; ++r)
      if (std::fabs(a[r * n + c]) > std::fabs(a[p * n + c])) p = r;
    if (a[p * n + c] == 0) throw std::invalid_argument("singular chart frame");
    for (int k = 0; k < n; ++k) {
      std::swap(a[p * n + k], a[c * n + k]);
      std::swap(inv[p * n + k], inv[c * n + k]);
    }
    long double d = a[c * n + c];
    for (int k = 0; k < n; ++k) {
      a[c * n + k] /= d;
      inv[c * n + k] /= d;
    }
    for (int r = 0; r < n; ++r) {
      if (r == c) continue;
      long double f = a[r * n + c];
      if (f == 0) continue;
      for (int k = 0; k < n; ++k) {
        a[r * n + k] -= f * a[c * n + k];
        inv[r * n + k] -= f * inv[c * n + k];
      }
    }
  }
  return inv;
}

// Homogeneous lift and projection, precomputed per chart.
struct ChartMaps {
  int n{0};
  bool complex{false};
  int d{0};
  std::vector<long double> frame, inv;  // empty = identity

  explicit ChartMaps(const Chart& c) {
    check_chart(c);
    if (auto* r = std::get_if<RealAffine>(&c)) {
      n = r->n;
      d = r->denominator;
      if (!r->frame.empty()) {
        frame = r->frame;
        inv = invert(r->frame, n);
      }
    } else {
      n = 2;
      complex = true;
    }
  }

  std::vector<cld> lift(const ProjPoint& p) const {
    std::vector<cld> h(n);
    if (complex) {
      if (p.x.size() != 2) throw std::invalid_argument("complex chart point needs (re, im)");
      h[0] = cld(p.x[0], p.x[1]);
      h[1] = 1;
      return h;
    }
    if ((int)p.x.size() != n - 1) throw std::invalid_argument("chart point has wrong dimension");
    std::vector<long double> y(n);
    for (int k = 0, t = 0; k < n; ++k) y[k] = k == d ? 1.0L : p.x[t++];
    for (int i = 0; i < n; ++i) {
      if (inv.empty()) {
        h[i] = y[i];
        continue;
      }
      long double s = 0;
      for (int k = 0; k < n; ++k) s += inv[std::size_t(i) * n + k] * y[k];
      h[i] = s;
    }
    return h;
  }

  // Denominator of h in this chart; used both for projection and rescaling.
  cld denom(const std::vector<cld>& h) const {
    if (complex) return h[1];
    if (frame.empty()) return h[d];
    cld s = 0;
    for (int k = 0; k < n; ++k) s += frame[std::size_t(d) * n + k] * h[k];
    return s;
  }

  ProjPoint project(const std::vector<cld>& h) const {
    cld w = denom(h);
    long double mag = 0;
    for (auto& z : h) mag = std::max(mag, std::abs(z));
    if (!(std::abs(w) > 1e-300L * std::max<long double>(mag, 1e-300L)) || !std::isfinite(std::abs(w)))
      throw ChartError("point leaves the chart");
    ProjPoint p;
    if (complex) {
      cld z = h[0] / w;
      p.x = {z.real(), z.imag()};
      return p;
    }
    for (int k = 0; k < n; ++k) {
      if (k == d) continue;
      cld y = 0;
      if (frame.empty())
        y = h[k];
      else
        for (int j = 0; j < n; ++j) y += frame[std::size_t(k) * n + j] * h[j];
      p.x.push_back((y / w).real());
    }
    return p;
  }
};

inline std::vector<cld> to_cld(const ExactMatrix& m) {
  auto v = m.to_complex();
  return std::vector<cld>(v.begin(), v.end());
}

inline std::vector<cld> apply(const std::vector<cld>& a, int n, const std::vector<cld>& h) {
  std::vector<cld> out(n);
  for (int i = 0; i < n; ++i) {
    cld s = 0;
    for (int k = 0; k < n; ++k) s += a[std::size_t(i) * n + k] * h[k];
    out[i] = s;
  }
  return out;
}

inline ExactMatrix acting_matrix(const GasketSpec& spec, int i) {
  return spec.acts_by_transpose ? spec.generators[i].transpose() : spec.generators[i];
}

}  // namespace detail

// psi_m(p) = [m v] for a lift v of p.
inline ProjPoint act(const ExactMatrix& m, const Chart& chart, const ProjPoint& p) {
  detail::ChartMaps cm(chart);
  if (m.n() != cm.n) throw std::invalid_argument("matrix and chart dimensions differ");
  if (cm.complex == false && !m.is_real()) throw std::invalid_argument("complex matrix on a real chart");
  return cm.project(detail::apply(detail::to_cld(m), cm.n, cm.lift(p)));
}

struct PointCloud {
  std::vector<std::array<double, 2>> points;
  std::array<double, 2> lo{0, 0}, hi{0, 0};

  void update_bbox() {
    if (points.empty()) {
      lo = hi = {0, 0};
      return;
    }
    lo = hi = points[0];
    for (auto& p : points)
      for (int k = 0; k < 2; ++k) {
        lo[k] = std::min(lo[k], p[k]);
        hi[k] = std::max(hi[k], p[k]);
      }
  }
};

// The m^k points psi_I(seed), |I| = k, leaves in lexicographic order of I.
inline PointCloud orbit_cloud(const GasketSpec& spec, const Chart& chart, const ProjPoint& seed, int depth,
                              unsigned threads = 0) {
  if (depth < 0) throw std::invalid_argument("depth must be >= 0");
  detail::ChartMaps cm(chart);
  if (cm.n != spec.n()) throw std::invalid_argument("chart dimension differs from the gasket");
  if (!cm.complex && cm.n != 3) throw std::invalid_argument("point clouds need a 2-dimensional chart");
  const int m = spec.m(), n = cm.n;
  std::vector<std::vector<cld>> gens;
  for (int i = 0; i < m; ++i) gens.push_back(detail::to_cld(detail::acting_matrix(spec, i)));

  std::uint64_t total = 1;
  for (int k = 0; k < depth; ++k) {
    if (total > (std::uint64_t(1) << 31) / m) throw std::invalid_argument("orbit cloud too large");
    total *= m;
  }
  PointCloud cloud;
  cloud.points.resize(total);
  auto emit = [&](std::uint64_t idx, const std::vector<cld>& h) {
    ProjPoint p = cm.project(h);
    cloud.points[idx] = {(double)p.x[0], (double)p.x[1]};
  };
  auto root = cm.lift(seed);
  cm.project(root);

  // Leaf index of a word is its base-m value; the outermost map is the first symbol.
  std::function<void(const std::vector<cld>&, int, std::uint64_t, std::uint64_t)> rec =
      [&](const std::vector<cld>& h, int left, std::uint64_t idx, std::uint64_t place) {
        if (left == 0) {
          emit(idx, h);
          return;
        }
        for (int i = 0; i < m; ++i) {
          auto g = detail::apply(gens[i], n, h);
          cld w = cm.denom(g);
          if (std::abs(w) == 0) throw ChartError("point leaves the chart");
          for (auto& z : g) z /= w;
          rec(g, left - 1, idx + std::uint64_t(i) * place, place * m);
        }
      };

  int split = std::min(depth, 3);
  std::uint64_t tasks = 1;
  for (int k = 0; k < split; ++k) tasks *= m;
  unsigned nt = std::min<std::uint64_t>(resolve_threads(threads), tasks);
  if (nt <= 1 || depth < 6) {
    rec(root, depth, 0, 1);
  } else {
    // Task t fixes the first `split` symbols applied to the seed (the low digits).
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr err;
    std::mutex mu;
    auto work = [&] {
      try {
        for (std::uint64_t t; (t = next++) < tasks;) {
          std::vector<cld> h = root;
          std::uint64_t rest = t;
          for (int k = 0; k < split; ++k) {
            h = detail::apply(gens[rest % m], n, h);
            rest /= m;
            cld w = cm.denom(h);
            if (std::abs(w) == 0) throw ChartError("point leaves the chart");
            for (auto& z : h) z /= w;
          }
          rec(h, depth - split, t, tasks);
        }
      } catch (...) {
        std::lock_guard<std::mutex> lk(mu);
        if (!err) err = std::current_exception();
      }
    };
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < nt; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
  }
  cloud.update_bbox();
  return cloud;
}

// Column form: f_i(e_i) = alpha e_i, f_i(e_j) = e_i + e_j, scaled by alpha^(-1/n).
inline GasketSpec build_real_sierpinski(int n, const Rational& alpha) {
  if (n < 3) throw std::invalid_argument("real Sierpinski gasket needs n >= 3");
  if (alpha < 1) throw std::invalid_argument("real Sierpinski gasket needs alpha >= 1");
  GasketSpec s;
  s.name = "sierpinski-real";
  ScaleFactor sc = alpha == 1 ? ScaleFactor{} : ScaleFactor(1 / alpha, 1, n);
  for (int i = 0; i < n; ++i) {
    ExactMatrix g = ExactMatrix::identity(n);
    for (int j = 0; j < n; ++j) g(i, j) = ExactScalar(1);
    g(i, i) = ExactScalar(alpha);
    g.set_scale(sc);
    s.generators.push_back(g);
  }
  s.norm = MaxAbs{};
  if (alpha == 1) {
    s.certificate.monotone = PermutationDominance{};
    for (int h = 1; h <= n; ++h)
      for (int t = 1; t <= n; ++t)
        if (h != t) s.tails[{h, t}] = TailModel{};
  }
  return s;
}

// psi_i([e_j]) = psi_j([e_i]) for i != j, compared projectively in exact arithmetic.
inline bool sierpinski_symmetric(const GasketSpec& spec) {
  int n = spec.n();
  auto col = [&](int i, int j) {
    ExactMatrix a = detail::acting_matrix(spec, i);
    std::vector<ExactScalar> v;
    for (int r = 0; r < n; ++r) v.push_back(a(r, j));
    return v;
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      auto a = col(i, j), b = col(j, i);
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
          if (!(a[r] * b[c] == a[c] * b[r])) return false;
    }
  return true;
}

namespace detail {

using CM = std::array<ExactScalar, 4>;

// Sends z1, z2, z3 to 0, 1, infinity.
inline CM cross_matrix(const ExactScalar& z1, const ExactScalar& z2, const ExactScalar& z3) {
  return {z2 - z3, -(z1 * (z2 - z3)), z2 - z1, -(z3 * (z2 - z1))};
}
inline CM cm_mul(const CM& a, const CM& b) {
  return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
}
inline CM cm_adj(const CM& a) { return {a[3], -a[1], -a[2], a[0]}; }

// Moebius map with z_k -> w_k.
inline CM mobius_through(const std::array<ExactScalar, 3>& z, const std::array<ExactScalar, 3>& w) {
  return cm_mul(cm_adj(cross_matrix(w[0], w[1], w[2])), cross_matrix(z[0], z[1], z[2]));
}

inline bool is_square(const BigInt& x, BigInt& root) {
  if (x < 0) return false;
  root = boost::multiprecision::sqrt(x);
  return root * root == x;
}

// Entries scaled to |det| = 1, up to a unit phase, with the (2,2) entry made real positive.
inline ExactMatrix normalize_sl2(CM a) {
  ExactScalar ph = a[3].is_zero() ? a[0] : a[3];
  ExactScalar c = ph.conj();
  for (auto& x : a) x = x * c;
  // Clear denominators.
  BigInt l = 1;
  for (auto& x : a)
    for (const Rational* r : {&x.re(), &x.im()}) l = boost::multiprecision::lcm(l, denominator(*r));
  for (auto& x : a) x = x * ExactScalar(Rational(l));
  ExactScalar det = a[0] * a[3] - a[1] * a[2];
  if (det.is_zero()) throw std::invalid_argument("degenerate Moebius map");
  // |det|^2 = r; scale = r^(-1/4) with r an integer here.
  BigInt r = numerator(det.norm_sq());
  // r^(1/4) = k * R^(1/4), trial division for small primes.
  BigInt k = 1, R = 1, rest = r;
  for (long p = 2; p < 20000 && rest > 1; ++p) {
    int e = 0;
    while (rest % p == 0) {
      rest /= p;
      ++e;
    }
    for (int t = 0; t < e / 4; ++t) k *= p;
    for (int t = 0; t < e % 4; ++t) R *= p;
  }
  R *= rest;
  ExactMatrix m(2, std::vector<ExactScalar>(a.begin(), a.end()));
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) m(i, j) = m(i, j) / ExactScalar(Rational(k));
  BigInt root;
  if (R == 1) return m;
  if (is_square(R, root)) {
    BigInt r2;
    if (is_square(root, r2)) {
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) m(i, j) = m(i, j) / ExactScalar(Rational(r2));
      return m;
    }
    m.set_scale(ScaleFactor(Rational(1, root), 1, 2));
    return m;
  }
  m.set_scale(ScaleFactor(Rational(1, R), 1, 4));
  return m;
}

// v = sqrt(q) exactly when q is a rational square, else to 1e-30.
inline Rational rational_sqrt(const Rational& q) {
  BigInt a = numerator(q), b = denominator(q), ra, rb;
  if (is_square(a, ra) && is_square(b, rb)) return Rational(ra, rb);
  BigInt scale = boost::multiprecision::pow(BigInt(10), 30);
  BigInt num = boost::multiprecision::sqrt(BigInt(a * b * scale * scale));
  return Rational(num, b * scale);
}

}  // namespace detail

// Vertices [1:1], [i:1], [-1:1]; psi_1([e_3]) = u + iv with v^2 = u(1-u).
inline GasketSpec build_complex_sierpinski(const Rational& u) {
  if (u < Rational(1, 5) || u > Rational(651, 1000)) throw std::invalid_argument("complex Sierpinski needs u in [1/5, 0.651]");
  Rational v = detail::rational_sqrt(u * (1 - u));
  ExactScalar one(1), i(Rational(0), Rational(1)), zero(0);
  ExactScalar p(u, v), q(-u, v);
  std::array<detail::CM, 3> maps = {
      detail::mobius_through({i, one, -one}, {i, p, q}),
      detail::mobius_through({one, i, -one}, {one, p, zero}),
      detail::mobius_through({-one, i, one}, {-one, q, zero}),
  };
  GasketSpec s;
  s.name = "sierpinski-complex";
  for (auto& a : maps) s.generators.push_back(detail::normalize_sl2(a));
  s.norm = MaxAbs{};
  return s;
}

// Simple-Sierpinski pattern: f_i(e_i) = alpha_i e_i, f_i(e_j) = beta_ij e_i + gamma_i e_j.
struct DualFrame {
  std::vector<std::vector<Rational>> eta;  // eta[i] as a row vector
  std::vector<Rational> alpha;
};

inline DualFrame dual_frame(const GasketSpec& spec) {
  if (!spec.is_real()) throw std::invalid_argument("dual frame needs a real gasket");
  const int n = spec.n();
  if (spec.m() != n) throw std::invalid_argument("dual frame needs n generators");
  DualFrame out;
  for (int i = 0; i < n; ++i) {
    ExactMatrix a = detail::acting_matrix(spec, i);
    auto e = [&](int r, int c) { return a(r, c).re(); };
    for (int r = 0; r < n; ++r)
      if (r != i && e(r, i) != 0) throw std::invalid_argument("generator does not fix e_i");
    Rational al = e(i, i);
    std::optional<Rational> ga;
    std::vector<Rational> eta(n);
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      for (int r = 0; r < n; ++r)
        if (r != i && r != j && e(r, j) != 0) throw std::invalid_argument("generator pattern mismatch");
      if (ga && *ga != e(j, j)) throw std::invalid_argument("generator pattern mismatch: gamma varies");
      ga = e(j, j);
      eta[j] = e(i, j);
    }
    eta[i] = al - *ga;
    // eta A_i = alpha_i eta, exactly.
    for (int c = 0; c < n; ++c) {
      Rational acc = 0;
      for (int r = 0; r < n; ++r) acc += eta[r] * e(r, c);
      if (acc != al * eta[c]) throw std::logic_error("dual frame eigen-identity fails");
    }
    out.eta.push_back(eta);
    out.alpha.push_back(al);
  }
  return out;
}

struct VolumeCheck {
  long double measured{0}, predicted{0}, ratio{0};
};

namespace detail {
inline long double det_ld(std::vector<long double> a, int n) {
  long double det = 1;
  for (int c = 0; c < n; ++c) {
    int p = c;
    for (int r = c + 1; r < n; ++r)
      if (std::fabs(a[r * n + c]) > std::fabs(a[p * n + c])) p = r;
    if (a[p * n + c] == 0) return 0;
    if (p != c) {
      for (int k = 0; k < n; ++k) std::swap(a[p * n + k], a[c * n + k]);
      det = -det;
    }
    det *= a[c * n + c];
    for (int r = c + 1; r < n; ++r) {
      long double f = a[r * n + c] / a[c * n + c];
      for (int k = c; k < n; ++k) a[r * n + k] -= f * a[c * n + k];
    }
  }
  return det;
}
}  // namespace detail

// Volume of the simplex spanned by the l1-normalized columns of A_I versus
// 1 / (n! * prod of column l1 norms). Needs det(A_I) = +-1 after scaling.
inline VolumeCheck simplex_volume_check(const GasketSpec& spec, const MultiIndex& word) {
  if (!spec.is_real()) throw std::invalid_argument("simplex volume needs a real gasket");
  const int n = spec.n();
  ExactMatrix a = word_matrix(spec.generators, word);
  long double sc = a.scale().to_ld();
  std::vector<long double> v(std::size_t(n) * n);
  long double fact = 1, prod = 1;
  for (int k = 2; k <= n; ++k) fact *= k;
  for (int c = 0; c < n; ++c) {
    Rational l1 = 0;
    for (int r = 0; r < n; ++r) l1 += abs(a(r, c).re());
    if (l1 == 0) throw std::invalid_argument("degenerate simplex");
    for (int r = 0; r < n; ++r) v[std::size_t(r) * n + c] = to_ld(a(r, c).re() / l1);
    prod *= sc * to_ld(l1);
  }
  VolumeCheck out;
  out.measured = std::fabs(detail::det_ld(v, n)) / fact;
  if (out.measured == 0) throw std::invalid_argument("degenerate simplex");
  out.predicted = 1 / (fact * prod);
  out.ratio = out.measured / out.predicted;
  return out;
}

struct DerivativeCheck {
  long double derivative{0}, lower{0}, upper{0};
  bool holds{false};
};

// |Psi'(phi_m)| at the midpoint against [1/(4|A|^2), 4/|A|^2], MaxAbs norm.
inline DerivativeCheck mobius_derivative_bounds(const ExactMatrix& m, long double phi1, long double phi2) {
  if (m.n() != 2 || !m.is_real()) throw std::invalid_argument("need a real 2x2 matrix");
  auto c = m.to_complex();
  long double a = c[0].real(), b = c[1].real(), cc = c[2].real(), d = c[3].real();
  long double det = a * d - b * cc;
  if (std::fabs(std::fabs(det) - 1) > 1e-9L) throw std::invalid_argument("need det = +-1");
  long double mid = (phi1 + phi2) / 2, den = cc * mid + d;
  if (den == 0) throw ChartError("midpoint is mapped to infinity");
  long double nrm = std::max({std::fabs(a), std::fabs(b), std::fabs(cc), std::fabs(d)});
  DerivativeCheck out;
  out.derivative = std::fabs(det) / (den * den);
  out.lower = 1 / (4 * nrm * nrm);
  out.upper = 4 / (nrm * nrm);
  out.holds = out.lower <= out.derivative && out.derivative <= out.upper;
  return out;
}

// Length of the image of [0,1] under the row-form word [[a,b],[c,d]]: |ad-bc|/((a+b)(c+d)).
inline Rational interval_length(const ExactMatrix& m) {
  if (m.n() != 2 || !m.is_real() || !m.scale().is_identity()) throw std::invalid_argument("need an unscaled real 2x2 matrix");
  Rational a = m(0, 0).re(), b = m(0, 1).re(), c = m(1, 0).re(), d = m(1, 1).re();
  Rational den = (a + b) * (c + d);
  if (den == 0) throw std::invalid_argument("degenerate interval");
  return abs(a * d - b * c) / abs(den);
}

// Moduli of the eigenvalues of the chart Jacobian of psi at p (2-D charts only),
// by central differences.
inline std::array<long double, 2> jacobian_eigen_moduli(const ExactMatrix& m, const Chart& chart, const ProjPoint& p,
                                                        long double h = 1e-6L) {
  long double J[2][2];
  for (int k = 0; k < 2; ++k) {
    ProjPoint a = p, b = p;
    a.x[k] += h;
    b.x[k] -= h;
    auto fa = act(m, chart, a), fb = act(m, chart, b);
    for (int r = 0; r < 2; ++r) J[r][k] = (fa.x[r] - fb.x[r]) / (2 * h);
  }
  long double tr = J[0][0] + J[1][1], det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
  cld disc = std::sqrt(cld(tr * tr / 4 - det, 0));
  long double l1 = std::abs(cld(tr / 2, 0) + disc), l2 = std::abs(cld(tr / 2, 0) - disc);
  return {std::min(l1, l2), std::max(l1, l2)};
}

}  // namespace gasket
