// One PASS/FAIL line per acceptance criterion; exit code 1 if any criterion fails.
// Set GASKET_ACCEPT_FULL=1 to run the A3 table to p=12 (about half an hour on one core).

#include <gasket/gasket.hpp>

#include "oracle.hpp"

#include <chrono>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

using namespace gasket;

namespace {

using clk = std::chrono::steady_clock;

double secs_since(clk::time_point t0) { return std::chrono::duration<double>(clk::now() - t0).count(); }

int failures = 0;

void report(int id, bool ok, const std::string& what) {
  if (!ok) ++failures;
  std::cout << (ok ? "PASS" : "FAIL") << " criterion " << id << ": " << what << std::endl;
}

void note(const std::string& s) { std::cout << "  " << s << std::endl; }

std::string fmt(double x, int prec = 5) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(prec) << x;
  return os.str();
}

bool near(double x, double target, double tol) { return std::fabs(x - target) <= tol; }

struct Golden {
  CountTable table;
  bool ok{false};
};

// Computes N(2^p) for p = 1..pmax and compares with the stored row.
Golden golden(int id, const std::string& name, int pmax, double limit_s) {
  auto spec = catalog::get_spec(name);
  auto ref = catalog::references(name).table;
  auto t0 = clk::now();
  Golden g;
  g.table = count_table(spec, pmax);
  double dt = secs_since(t0);
  int bad = 0;
  for (auto& [p, n] : g.table.rows)
    if (n != ref.at(p - 1)) {
      ++bad;
      note("p=" + std::to_string(p) + " computed " + n.str() + " expected " + ref.at(p - 1).str());
    }
  g.ok = bad == 0 && g.table.certified && dt < limit_s;
  report(id, g.ok,
         name + " table p=1.." + std::to_string(pmax) + ": " + (bad ? std::to_string(bad) + " mismatches" : "exact") +
             ", last " + g.table.rows.back().second.str() + ", certified=" + (g.table.certified ? "true" : "false") +
             ", mode " + g.table.mode + ", " + fmt(dt, 1) + " s (limit " + fmt(limit_s, 0) + " s)");
  return g;
}

std::vector<std::pair<int, BigInt>> fixture_rows(const std::string& name) {
  std::vector<std::pair<int, BigInt>> r;
  auto t = catalog::references(name).table;
  for (std::size_t i = 0; i < t.size(); ++i) r.push_back({int(i + 1), t[i]});
  return r;
}

void criterion6() {
  const bool full = std::getenv("GASKET_ACCEPT_FULL") != nullptr;
  const int pmax = full ? 12 : 10;
  auto spec = catalog::get_spec("apollonian");
  auto ref = catalog::references("apollonian").table;
  EngineOptions opt;
  if (full) opt.budget = 2e10;
  auto t0 = clk::now();
  auto t = count_table(spec, pmax, true, opt);
  double dt = secs_since(t0);
  int bad = 0;
  for (auto& [p, n] : t.rows)
    if (n != ref.at(p - 1)) {
      ++bad;
      note("p=" + std::to_string(p) + " computed " + n.str() + " table " + ref.at(p - 1).str());
    }
  for (int p = pmax + 1; p <= 12; ++p) note("p=" + std::to_string(p) + " not computed (set GASKET_ACCEPT_FULL=1)");
  note("p=13 table value " + ref.at(12).str() + " is smaller than p=12 " + ref.at(11).str() +
       ": suspected typo, not compared");
  report(6, bad == 0 && pmax == 12,
         "A3 table p=1.." + std::to_string(pmax) + ": " + std::to_string(bad) + " mismatches, " + fmt(dt, 1) + " s");
}

void criterion7(const Golden& c2, const Golden& c3, const Golden& f) {
  auto e2 = fit_exponent(c2.table), e3 = fit_exponent(c3.table), ef = fit_exponent(f.table);
  auto eh = fit_exponent(fixture_rows("hirst"));
  bool ok = near(e2.slope, 2.0, 0.05) && near(e3.slope, 2.44, 0.05) && near(ef.slope, 1.06, 0.03) &&
            near(eh.slope, 1.30569, 0.0005);
  report(7, ok,
         "fits C2 " + fmt(e2.slope, 4) + " (2.00+-0.05), C3 " + fmt(e3.slope, 4) + " (2.44+-0.05), F " +
             fmt(ef.slope, 4) + " (1.06+-0.03), Hirst fixture " + fmt(eh.slope, 5) + " (1.30569+-0.0005)");
}

void criterion8(const Golden& c2g, const Golden& c3g) {
  auto c2 = catalog::get_spec("C2"), c3 = catalog::get_spec("C3");
  auto s2 = fit_exponent(c2g.table).slope, s3 = fit_exponent(c3g.table).slope;
  auto a = bound_exponent(c2, 0, *c2.coefficient), b = bound_exponent(c2, 2, *c2.coefficient);
  auto c = bound_exponent(c3, 0, *c3.coefficient), d = bound_exponent(c3, 2, *c3.coefficient);
  auto in = [](const BoundInterval& i, double s) { return i.s_lower <= s && s <= i.s_upper; };
  bool ok = near(a.s_lower, 1.54, 0.02) && near(b.s_lower, 1.70, 0.02) && near(b.s_upper, 3.93, 0.02) &&
            near(c.s_lower, 1.52, 0.02) && near(d.s_lower, 1.7, 0.1) && near(d.s_upper, 7.1, 0.1) && in(a, s2) &&
            in(b, s2) && in(c, s3) && in(d, s3);
  report(8, ok,
         "C2 k=0 lower " + fmt(a.s_lower, 4) + ", C2 k=2 [" + fmt(b.s_lower, 4) + ", " + fmt(b.s_upper, 4) +
             "], C3 k=0 lower " + fmt(c.s_lower, 4) + ", C3 k=2 [" + fmt(d.s_lower, 4) + ", " + fmt(d.s_upper, 4) +
             "]; fits " + fmt(s2, 3) + ", " + fmt(s3, 3) + " inside");
}

void criterion9() {
  struct Case {
    std::string label;
    ClosedFormFamily fam;
    double expect, tol;
  };
  std::vector<Case> cases = {
      {"affine(1/4,1/2)", ClosedFormFamily::affine(0.25, 0.5), 2.42632, 1e-4},
      {"affine(3/4,1/2)", ClosedFormFamily::affine(0.75, 0.5), 2.45425, 1e-4},
      {"affine(1/2,3/4)", ClosedFormFamily::affine(0.5, 0.75), 2.34443, 1e-4},
      {"affine(1/5,3/10)", ClosedFormFamily::affine(0.2, 0.3), 2.43735, 1e-4},
      {"FL1(3/4,1/2)", ClosedFormFamily::fl1(0.75, 0.5), 1.72368, 1e-4},
      {"FL2(1/4)", ClosedFormFamily::fl2(0.25), 1.68886, 1e-4},
      {"affine(1/2,1/2)", ClosedFormFamily::affine(0.5, 0.5), 1.5 * std::log2(3.0), 1e-10},
  };
  bool ok = true;
  std::string msg;
  for (auto& c : cases) {
    auto r = solve_closed_form(c.fam);
    bool good = near((double)r.root, c.expect, c.tol) && r.residual < 1e-10;
    ok = ok && good;
    msg += c.label + "=" + fmt((double)r.root, 5) + (good ? "" : "(!)") + " ";
  }
  auto xi = xi_root(catalog::get_spec("complex", {{"u", "1/2"}}), 10);
  bool xok = near(xi.root, 2 * std::log2(3.0), 0.02);
  ok = ok && xok;
  report(9, ok, msg + "xi(complex u=1/2)=" + fmt(xi.root, 4) + " (2log2(3)=" + fmt(2 * std::log2(3.0), 4) + ")");
}

// Each property returns an empty string on success, else a reason.
std::string prop_pq() {
  for (int n = 1; n <= 5; ++n) {
    std::vector<std::vector<ExactScalar>> rows(n, std::vector<ExactScalar>(n, ExactScalar(1)));
    ExactMatrix J = ExactMatrix::identity(n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) J(r, c) = ExactScalar(1);
    Rational ratio = norm_eval(MaxAbs{}, mat_mul(J, J)).magnitude / (norm_eval(MaxAbs{}, J).magnitude * norm_eval(MaxAbs{}, J).magnitude);
    if (ratio != n) return "witness ratio " + ratio.str() + " for n=" + std::to_string(n);
  }
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> U(-9, 9);
  for (int t = 0; t < 2000; ++t) {
    int n = 1 + t % 5;
    ExactMatrix P = ExactMatrix::identity(n), Q = P;
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) {
        P(r, c) = ExactScalar(U(rng));
        Q(r, c) = ExactScalar(U(rng));
      }
    if (norm_eval(MaxAbs{}, mat_mul(P, Q)).magnitude >
        n * norm_eval(MaxAbs{}, P).magnitude * norm_eval(MaxAbs{}, Q).magnitude)
      return "bound violated";
  }
  return "";
}

std::string prop_coefficients() {
  auto c2 = fast_coefficient_sample(catalog::get_spec("C2"), 6, 6).min_ratio;
  auto a3 = fast_coefficient_sample(catalog::get_spec("apollonian"), 5, 5).min_ratio;
  auto h = fast_coefficient_sample(catalog::get_spec("hirst"), 4, 4).min_ratio;
  if (std::fabs(c2 - 0.5L) > 1e-15L) return "C2 minimum " + fmt((double)c2, 6);
  if (a3 < 0.2L - 1e-15L) return "A3 minimum " + fmt((double)a3, 6);
  if (h < 0.25L - 1e-15L) return "Hirst minimum " + fmt((double)h, 6);
  return "";
}

std::string prop_dedup() {
  for (auto name : {"C2", "C3", "F", "hirst", "apollonian"})
    if (auto k = dedup_scan(catalog::get_spec(name), 8)) return std::string(name) + " has " + std::to_string(k) + " collisions";
  return "";
}

std::string prop_hirst_rows() {
  std::string err;
  walk_words(catalog::get_spec("hirst"), 10, [&](const MultiIndex& w, const ExactMatrix& m) {
    if (w.empty()) return true;
    for (int c = 0; c < 4; ++c)
      for (int r = 0; r < 4; ++r)
        if (m(r, c).re() > m(2, c).re()) {
          err = "third row not dominant at " + index_str(w);
          return false;
        }
    return true;
  });
  return err;
}

std::string prop_volume() {
  std::mt19937_64 rng(5);
  for (int n : {3, 4})
    for (auto alpha : {Rational(1), Rational(2)}) {
      auto spec = build_real_sierpinski(n, alpha);
      std::uniform_int_distribution<int> sym(1, n), len(1, 8);
      for (int t = 0; t < 100; ++t) {
        MultiIndex w(len(rng));
        for (auto& x : w) x = sym(rng);
        auto v = simplex_volume_check(spec, w);
        if (std::fabs(v.ratio - 1) > 1e-12L) return "ratio " + fmt((double)v.ratio, 15) + " at " + index_str(w);
      }
    }
  return "";
}

std::string prop_mobius() {
  auto b = mobius_derivative_bounds(catalog::get_spec("B").generators[0], 1, 2);
  if (!b.holds) return "B1 on [1,2] outside window";
  auto c2 = catalog::get_spec("C2");
  auto chart = simplex_chart(2);
  std::string err;
  walk_words(c2, 12, [&](const MultiIndex& w, const ExactMatrix& m) {
    Rational d = interval_length(m), n = norm_eval(MaxAbs{}, m).magnitude;
    ExactMatrix t = m.transpose();
    long double measured = std::fabs(act(t, chart, {{1}}).x[0] - act(t, chart, {{0}}).x[0]);
    if (d < 1 / (4 * n * n) || d > 1 / n || std::fabs(measured - to_ld(d)) > 1e-15L) {
      err = "interval identity fails at " + index_str(w);
      return false;
    }
    return true;
  });
  return err;
}

std::string prop_xi() {
  std::vector<std::pair<std::string, catalog::Params>> fams = {
      {"C2", {}}, {"triangular", {{"rho", "2:2"}}}, {"triangular", {{"rho", "3/2:5/2:4"}}}};
  for (auto& [name, params] : fams) {
    auto spec = catalog::get_spec(name, params);
    const int k = 8;
    if (std::fabs(std::pow(level_sum(spec, k, 0), 1.0L / k) - spec.m()) > 1e-9L) return name + ": xi(0) != m";
    long double prev = INFINITY;
    for (double s : {0.0, 0.5, 1.0, 2.0, 4.0}) {
      long double xi = std::pow(level_sum(spec, k, s), 1.0L / k);
      if (!(xi < prev)) return name + ": xi not decreasing at s=" + fmt(s, 1);
      prev = xi;
    }
  }
  return "";
}

std::string prop_oracle() {
  std::string err;
  for (auto& [name, params] : oracle::instances()) {
    auto spec = catalog::get_spec(name, params);
    auto t0 = clk::now();
    auto o = oracle::enumerate_until(spec, 4, 2e10);
    note("oracle " + name + " depth " + std::to_string(o.depth) + ", " + fmt(secs_since(t0), 1) + " s");
    for (int p = 1; p <= 4; ++p) {
      auto expect = o.count(p);
      if (!expect) {
        err += name + " p=" + std::to_string(p) + " unresolved; ";
        break;
      }
      auto got = count_below(spec, 2, p).count;
      if (got != BigInt(*expect)) err += name + " p=" + std::to_string(p) + " engine " + got.str() + " oracle " + std::to_string(*expect) + "; ";
    }
  }
  return err;
}

void criterion10() {
  std::vector<std::pair<std::string, std::string (*)()>> props = {
      {"PQ bound", prop_pq},           {"fast coefficients", prop_coefficients}, {"dedup", prop_dedup},
      {"Hirst rows", prop_hirst_rows}, {"simplex volume", prop_volume},           {"Moebius/interval", prop_mobius},
      {"xi", prop_xi},                 {"oracle r<=2^4", prop_oracle}};
  bool ok = true;
  std::string msg;
  for (auto& [label, fn] : props) {
    auto t0 = clk::now();
    auto err = fn();
    note(label + ": " + (err.empty() ? "ok" : err) + " (" + fmt(secs_since(t0), 1) + " s)");
    ok = ok && err.empty();
    msg += label + (err.empty() ? " ok; " : " FAILED; ");
  }
  report(10, ok, msg);
}

void criterion11(const Golden& c3g) {
  auto sg = catalog::get("sierpinski", {{"alpha", "2"}});
  auto c3 = catalog::get("C3");
  auto ds = box_dimension(orbit_cloud(sg.spec, *sg.chart, *sg.seed, 11));
  auto dc = box_dimension(orbit_cloud(c3.spec, *c3.chart, *c3.seed, 11));
  bool ok = near(ds.slope, 1.585, 0.06) && near(dc.slope, 1.72, 0.10);
  report(11, ok,
         "box dimension Sierpinski(alpha=2) " + fmt(ds.slope, 4) + " (1.585+-0.06), C3 " + fmt(dc.slope, 4) +
             " (1.72+-0.10); jittered means " + fmt(ds.mean_slope, 4) + ", " + fmt(dc.mean_slope, 4));

  // Informational: 3 dim >= 2 s, with the jitter spread and fit error as error bars.
  auto fit = fit_exponent(c3g.table);
  double spread = 0;
  for (double j : dc.jitter_slopes) spread = std::max(spread, std::fabs(j - dc.slope));
  double lhs = 3 * dc.slope, rhs = 2 * fit.slope, err = 3 * spread + 2 * fit.stderr_;
  std::string verdict = lhs + err >= rhs ? "consistent" : "violated beyond error bars";
  note("INFO probe: 3*dim(C3) = " + fmt(lhs, 3) + ", 2*s(C3) = " + fmt(rhs, 3) + ", error bar " + fmt(err, 3) + ": " + verdict);
}

}  // namespace

int main() {
  auto t0 = clk::now();
  try {
    auto c2 = golden(1, "C2", 13, 300);
    auto c3 = golden(2, "C3", 9, 300);
    golden(3, "C4", 8, 300);
    auto f = golden(4, "F", 15, 120);
    golden(5, "hirst", 20, 300);
    criterion6();
    criterion7(c2, c3, f);
    criterion8(c2, c3);
    criterion9();
    criterion10();
    criterion11(c3);
  } catch (const std::exception& e) {
    std::cout << "FAIL aborted: " << e.what() << std::endl;
    return 1;
  }
  std::cout << (failures ? "FAILED " : "ALL PASSED ") << failures << " criteria failed, " << fmt(secs_since(t0), 0)
            << " s" << std::endl;
  return failures ? 1 : 0;
}
