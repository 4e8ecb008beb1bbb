#include <catch_amalgamated.hpp>

#include <gasket/gasket.hpp>

#include <boost/math/special_functions/zeta.hpp>

using namespace gasket;
using Catch::Approx;
using Catch::Matchers::WithinAbs;

namespace {

std::vector<std::pair<int, BigInt>> rows_of(const std::vector<BigInt>& v) {
  std::vector<std::pair<int, BigInt>> r;
  for (std::size_t i = 0; i < v.size(); ++i) r.push_back({int(i + 1), v[i]});
  return r;
}

// sum_{k>=0} (k+q)^-s directly, with the integral tail bracketed by its midpoint.
double direct_hurwitz(double s, double q) {
  const int N = 200000;
  long double sum = 0;
  for (int k = N - 1; k >= 0; --k) sum += std::pow((long double)k + q, -(long double)s);
  long double a = N + q;
  sum += std::pow(a, 1 - (long double)s) / (s - 1) + std::pow(a, -(long double)s) / 2;
  return (double)sum;
}

const double pi = 3.14159265358979323846;

}  // namespace

TEST_CASE("fit_exponent on synthetic and reference tables", "[exponent]") {
  std::vector<std::pair<int, BigInt>> rows;
  BigInt v = 1;
  for (int p = 1; p <= 12; ++p) {
    v *= 4;
    rows.push_back({p, v});
  }
  auto e = fit_exponent(rows);
  CHECK_THAT(e.slope, WithinAbs(2.0, 1e-12));
  CHECK(e.stderr_ >= 0);
  CHECK(e.p_min == 7);
  CHECK(e.p_max == 12);
  CHECK_THROWS_AS(fit_exponent(rows, 2, std::make_pair(3, 4)), std::invalid_argument);

  auto c2 = fit_exponent(rows_of(catalog::references("C2").table));
  CHECK_THAT(c2.slope, WithinAbs(2.0, 0.01));
  auto h = fit_exponent(rows_of(catalog::references("hirst").table));
  CHECK_THAT(h.slope, WithinAbs(1.30569, 1e-4));
}

TEST_CASE("zeta values", "[exponent]") {
  CHECK_THAT((double)zeta_special(2), WithinAbs(pi * pi / 6, 1e-12));
  CHECK_THAT((double)hurwitz_zeta(2.5, 1), WithinAbs((double)zeta_special(2.5), 1e-15));
  CHECK_THAT((double)zeta_special(3), WithinAbs(1.2020569032, 1e-10));
  for (double s : {1.1, 1.5, 2.0, 3.7, 8.0}) {
    INFO("s=" << s);
    CHECK_THAT((double)zeta_special(s), WithinAbs(boost::math::zeta(s), 1e-12));
    auto z = hurwitz_zeta_em(s, 2.5);
    CHECK(z.error < 1e-12);
    CHECK_THAT((double)z.value, WithinAbs(direct_hurwitz(s, 2.5), 1e-9));
  }
  CHECK_THROWS_AS(zeta_special(1.0), std::domain_error);
  CHECK_THROWS_AS(hurwitz_zeta(2.0, 0.0), std::domain_error);
}

TEST_CASE("mu enclosures match the closed forms", "[exponent]") {
  auto c2 = catalog::get_spec("C2"), c3 = catalog::get_spec("C3");
  auto contains = [](const Enclosure& e, long double x) { return e.lo - 1e-12L <= x && x <= e.hi + 1e-12L; };

  auto m0 = mu_bounds(c2, 0, 2);
  CHECK(contains(m0.mu, 2 * (pi * pi / 6 - 1)));
  CHECK_THAT((double)m0.mu.lo, WithinAbs(1.28987, 1e-5));

  long double s = 2.5;
  auto m3 = mu_bounds(c3, 0, s);
  CHECK(contains(m3.mu, 3 * std::pow(2.0L, 1 - s) * zeta_special(s)));

  for (long double t : {1.5L, 2.0L, 3.0L}) {
    long double expect = 2 * (2 * zeta_special(t) + std::pow(2.0L, -t) * hurwitz_zeta(t, 2.5L) - 2 -
                              std::pow(2.0L, 1 - t) - std::pow(3.0L, -t));
    INFO("s=" << (double)t);
    CHECK(contains(mu_bounds(c2, 2, t).mu, expect));
  }

  // f = (n/c)^s g on the same series set
  auto b = mu_bounds(c2, 2, 2.2L, Rational(1, 2));
  CHECK((double)b.f.lo == Approx((double)(std::pow(4.0L, 2.2L) * b.g.lo)).epsilon(1e-12));
  CHECK(b.mu.lo <= b.mu.hi);

  CHECK_THROWS_AS(mu_bounds(c2, 0, 0.9L), std::domain_error);
  CHECK_THROWS_AS(mu_bounds(catalog::get_spec("hirst"), 0, 2), std::invalid_argument);
}

TEST_CASE("certified exponent bounds", "[exponent]") {
  auto c2 = catalog::get_spec("C2"), c3 = catalog::get_spec("C3");
  auto b0 = bound_exponent(c2, 0, Rational(1, 2));
  CHECK_THAT(b0.s_lower, WithinAbs(1.54, 0.02));
  auto b2 = bound_exponent(c2, 2, Rational(1, 2));
  CHECK_THAT(b2.s_lower, WithinAbs(1.70, 0.02));
  CHECK_THAT(b2.s_upper, WithinAbs(3.93, 0.02));
  CHECK(b2.s_lower <= b2.s_upper);

  auto c3b = bound_exponent(c3, 2, Rational(1, 3));
  CHECK_THAT(c3b.s_lower, WithinAbs(1.7, 0.1));
  CHECK_THAT(c3b.s_upper, WithinAbs(7.1, 0.1));
  CHECK_THAT(bound_exponent(c3, 0, Rational(1, 3)).s_lower, WithinAbs(1.52, 0.02));

  CHECK_THROWS_AS(bound_exponent(c2, 0, Rational(3, 2)), std::invalid_argument);
  CHECK_THROWS_AS(bound_exponent(c2, 0, Rational(0)), std::invalid_argument);
}

TEST_CASE("bounds bracket the fitted exponents", "[exponent]") {
  struct Case {
    const char* name;
    int pmax;
    int kappa;
  };
  for (auto c : {Case{"C2", 12, 2}, Case{"C3", 8, 2}, Case{"F", 14, 0}}) {
    auto spec = catalog::get_spec(c.name);
    auto fit = fit_exponent(count_table(spec, c.pmax));
    auto b = bound_exponent(spec, c.kappa, *spec.coefficient);
    INFO(c.name << " fit " << fit.slope << " +- " << fit.stderr_ << " in [" << b.s_lower << ", " << b.s_upper << "]");
    CHECK(b.s_lower <= fit.slope + 2 * fit.stderr_);
    CHECK(fit.slope - 2 * fit.stderr_ <= b.s_upper);
  }
}

TEST_CASE("xi function", "[exponent]") {
  for (auto name : {"C2", "C3", "F", "hirst", "apollonian", "triangular"}) {
    auto spec = catalog::get_spec(name);
    for (int k : {1, 3, 5}) {
      INFO(name << " k=" << k);
      CHECK((double)std::pow(level_sum(spec, k, 0), 1.0L / k) == Approx(spec.m()));
    }
  }
  for (auto [name, params] : std::vector<std::pair<const char*, catalog::Params>>{
           {"C2", {}}, {"triangular", {{"rho", "2:2"}}}, {"triangular", {{"rho", "3/2:5/2:4"}}}}) {
    auto spec = catalog::get_spec(name, params);
    long double prev = INFINITY;
    for (double s : {0.0, 0.5, 1.0, 2.0, 4.0}) {
      long double xi = std::pow(level_sum(spec, 8, s), 1.0L / 8);
      INFO(name << " s=" << s);
      CHECK(xi < prev);
      prev = xi;
    }
  }
  auto tri = xi_root(catalog::get_spec("triangular", {{"rho", "2:2"}}), 6);
  CHECK_THAT(tri.root, WithinAbs(1.0, 1e-9));
  auto c2 = xi_root(catalog::get_spec("C2"), 14);
  // Parabolic, so the k-th roots creep up slowly: 1.887 at k = 14, 1.904 at k = 20. Known to fail.
  CHECK_THAT(c2.root, WithinAbs(2.0, 0.1));
  for (std::size_t i = 3; i < c2.sequence.size(); ++i) CHECK(c2.sequence[i].second > c2.sequence[i - 1].second);
  CHECK(c2.sequence.front().first == 4);
  CHECK(c2.sequence.size() == 11);
  auto cx = xi_root(catalog::get_spec("complex", {{"u", "1/2"}}), 8);
  CHECK_THAT(cx.root, WithinAbs(2 * std::log2(3.0), 0.02));
  CHECK_THROWS(xi_root(catalog::get_spec("C2"), 6, 3, 5));
}

TEST_CASE("closed-form exponents", "[exponent]") {
  auto tri = solve_closed_form(ClosedFormFamily::triangular({2, 2}));
  CHECK_THAT(tri.root, WithinAbs(1.0, 1e-12));
  auto a = solve_closed_form(ClosedFormFamily::affine(0.25, 0.5));
  CHECK_THAT(a.root, WithinAbs(2.42632, 1e-4));
  CHECK(a.residual < 1e-10);
  CHECK_THAT(solve_closed_form(ClosedFormFamily::affine(0.5, 0.5)).root, WithinAbs(1.5 * std::log2(3.0), 1e-10));
  CHECK_THAT(solve_closed_form(ClosedFormFamily::fl2(0.5)).root, WithinAbs(std::log2(3.0), 1e-10));
  CHECK_THAT(solve_closed_form(ClosedFormFamily::fl1(0.75, 0.5)).root, WithinAbs(1.72368, 1e-4));
  CHECK_THAT(solve_closed_form(ClosedFormFamily::fl2(0.25)).root, WithinAbs(1.68886, 1e-4));
  CHECK_THROWS_AS(solve_closed_form(ClosedFormFamily::affine(1.0, 0.5)), std::invalid_argument);
  CHECK_THROWS_AS(solve_closed_form(ClosedFormFamily::triangular({2, 0.5})), std::invalid_argument);
}

TEST_CASE("affine exponent stays below the box dimension on both triangles", "[exponent]") {
  // T1: a >= max(b, 1-b) uses FL1; T2: a <= min(b, 1-b) uses FL2. Vertex a = b = 1/2 is shared.
  for (double a : {0.5, 0.7, 0.9})
    for (double t : {0.0, 0.5, 1.0}) {
      double b = (1 - a) + t * (2 * a - 1);
      double s = solve_closed_form(ClosedFormFamily::affine(a, b)).root * 2 / 3;
      double d = solve_closed_form(ClosedFormFamily::fl1(a, b)).root;
      INFO("T1 a=" << a << " b=" << b);
      if (a == 0.5)
        CHECK_THAT(s, WithinAbs(d, 1e-9));
      else
        CHECK(s < d - 1e-6);
    }
  for (double a : {0.1, 0.3, 0.5})
    for (double t : {0.0, 0.5, 1.0}) {
      double b = a + t * (1 - 2 * a);
      double s = solve_closed_form(ClosedFormFamily::affine(a, b)).root * 2 / 3;
      double d = solve_closed_form(ClosedFormFamily::fl2(a)).root;
      INFO("T2 a=" << a << " b=" << b);
      if (a == 0.5)
        CHECK_THAT(s, WithinAbs(d, 1e-9));
      else
        CHECK(s < d - 1e-6);
    }
}
