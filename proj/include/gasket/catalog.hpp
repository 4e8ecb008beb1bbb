#pragma once

#include "exponent.hpp"
#include "projective.hpp"

#include <map>

namespace gasket::catalog {

using Params = std::map<std::string, std::string>;

// Reference values used by tests and the CLI. `where` says where each number comes from.
struct References {
  std::vector<BigInt> table;  // N(2^p), p = 1, 2, ...
  std::optional<double> exponent;
  std::optional<double> dimension;
  std::string where;
};

struct Entry {
  std::string name;
  GasketSpec spec;
  std::optional<ClosedFormFamily> closed_form;
  std::optional<Chart> chart;
  std::optional<ProjPoint> seed;  // a point of the invariant region

  std::optional<double> closed_form_root() const {
    if (!closed_form) return std::nullopt;
    return solve_closed_form(*closed_form).root;
  }
};

struct UnknownGasket : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

namespace detail {

inline ExactMatrix int_matrix(std::initializer_list<std::initializer_list<long long>> rows) {
  int n = (int)rows.size();
  std::vector<ExactScalar> e;
  for (auto& r : rows)
    for (auto x : r) e.emplace_back(x);
  return ExactMatrix(n, std::move(e));
}

inline void all_unipotent_tails(GasketSpec& s) {
  for (int h = 1; h <= s.m(); ++h)
    for (int t = 1; t <= s.m(); ++t)
      if (h != t) s.tails[{h, t}] = TailModel{};
}

inline Rational param(const Params& p, const std::string& key, const std::string& dflt) {
  auto it = p.find(key);
  return parse_rational(it == p.end() ? dflt : it->second);
}

inline void check_keys(const Params& p, std::initializer_list<const char*> allowed) {
  for (auto& [k, v] : p) {
    bool ok = false;
    for (auto a : allowed) ok = ok || k == a;
    if (!ok) throw std::invalid_argument("unknown parameter '" + k + "'");
  }
}

inline RealAffine simplex3() { return simplex_chart(3); }

inline ProjPoint centroid3() { return ProjPoint{{1.0L / 3, 1.0L / 3}}; }

}  // namespace detail

inline std::vector<std::string> list() {
  return {"C2", "C3", "C4", "C2alpha", "hirst", "F", "B", "apollonian", "complex", "sierpinski", "affine", "triangular"};
}

inline std::string describe(const std::string& name) {
  static const std::map<std::string, std::string> d = {
      {"C2", "Stern-Brocot pair [[1,0],[1,1]], [[1,1],[0,1]]"},
      {"C3", "cubic semigroup in SL3(N), three generators"},
      {"C4", "cubic semigroup in SL4(N), four generators"},
      {"C2alpha", "deformed C2 family, param alpha in [1,2]"},
      {"hirst", "Hirst matrices with the curvature functional"},
      {"F", "F1=[[1,1],[1,0]], F2=[[2,1],[1,0]]"},
      {"B", "two copies of [[2,1],[1,1]]"},
      {"apollonian", "complex gasket at u=1/5 (alias A3)"},
      {"complex", "complex projective Sierpinski gasket, param u in [1/5, 0.651]"},
      {"sierpinski", "real projective Sierpinski gasket, params n>=3, alpha>=1"},
      {"affine", "affine Sierpinski gasket, params a, b in (0,1)"},
      {"triangular", "rho_i [[1/2,beta_i],[0,1]], param rho=r1:r2:..."},
  };
  auto it = d.find(name);
  return it == d.end() ? "" : it->second;
}

inline Entry get(std::string name, const Params& p = {}) {
  using detail::int_matrix;
  if (name == "A3") name = "apollonian";
  Entry e;
  e.name = name;
  GasketSpec& s = e.spec;
  s.name = name;
  if (name == "C2") {
    detail::check_keys(p, {});
    s.generators = {int_matrix({{1, 0}, {1, 1}}), int_matrix({{1, 1}, {0, 1}})};
    s.certificate.monotone = PermutationDominance{};
    detail::all_unipotent_tails(s);
    s.coefficient = Rational(1, 2);
    s.acts_by_transpose = true;
  } else if (name == "C3") {
    detail::check_keys(p, {});
    s.generators = {int_matrix({{1, 0, 0}, {1, 1, 0}, {1, 0, 1}}), int_matrix({{1, 1, 0}, {0, 1, 0}, {0, 1, 1}}),
                    int_matrix({{1, 0, 1}, {0, 1, 1}, {0, 0, 1}})};
    s.certificate.monotone = PermutationDominance{};
    detail::all_unipotent_tails(s);
    // The fastness argument used for C2 does not carry over with 1/2 here.
    s.coefficient = Rational(1, 3);
    s.acts_by_transpose = true;
    e.chart = detail::simplex3();
    e.seed = detail::centroid3();
  } else if (name == "C4") {
    detail::check_keys(p, {});
    for (int i = 0; i < 4; ++i) {
      ExactMatrix g = ExactMatrix::identity(4);
      for (int j = 0; j < 4; ++j) g(i, j) = ExactScalar(1);
      s.generators.push_back(g);
    }
    s.certificate.monotone = PermutationDominance{};
    detail::all_unipotent_tails(s);
    s.acts_by_transpose = true;
  } else if (name == "C2alpha") {
    detail::check_keys(p, {"alpha"});
    Rational a = detail::param(p, "alpha", "3/2");
    if (a < 1 || a > 2) throw std::invalid_argument("C2alpha needs alpha in [1,2]");
    ExactScalar x(a), y(1 / a), z(0);
    s.generators = {ExactMatrix{{x, z}, {y, y}}, ExactMatrix{{y, y}, {z, x}}};
    s.acts_by_transpose = true;
  } else if (name == "hirst") {
    detail::check_keys(p, {});
    s.generators = {int_matrix({{1, 0, 0, 0}, {0, 1, 0, 0}, {1, 1, 1, 2}, {1, 1, 0, 1}}),
                    int_matrix({{1, 0, 0, 0}, {0, 0, 1, 0}, {1, 1, 1, 2}, {1, 0, 1, 1}}),
                    int_matrix({{0, 1, 0, 0}, {0, 0, 1, 0}, {1, 1, 1, 2}, {0, 1, 1, 1}})};
    s.norm = WeightedBilinear{{-1, 2, 2, 0}, {1, 1, 1, 2}};
    s.certificate.monotone = PermutationDominance{};
    s.certificate.envelope = Envelope{MaxAbs{}, Rational(1)};
    s.coefficient = Rational(1, 4);
  } else if (name == "F") {
    detail::check_keys(p, {});
    s.generators = {int_matrix({{1, 1}, {1, 0}}), int_matrix({{2, 1}, {1, 0}})};
    s.certificate.monotone = PermutationDominance{};
    s.tails[{2, 1}] = TailModel{TailModel::Kind::Geometric, Rational(3, 2), false};
    s.tails[{1, 2}] = TailModel{TailModel::Kind::Geometric, Rational(2), false};
    s.coefficient = Rational(1, 3);
  } else if (name == "B") {
    detail::check_keys(p, {});
    s.generators = {int_matrix({{2, 1}, {1, 1}}), int_matrix({{2, 1}, {1, 1}})};
    s.certificate.monotone = PermutationDominance{};
    s.tails[{2, 1}] = TailModel{TailModel::Kind::Geometric, Rational(2), false};
    s.tails[{1, 2}] = TailModel{TailModel::Kind::Geometric, Rational(2), false};
  } else if (name == "apollonian") {
    detail::check_keys(p, {});
    ExactScalar i = ExactScalar::I(), h(Rational(1, 2)), t(Rational(3, 2)), z(0), two(2);
    s.generators = {ExactMatrix{{z, i}, {i, two}}, ExactMatrix{{h, h}, {-h, t}}, ExactMatrix{{h, -h}, {h, t}}};
    s.certificate.monotone = DominantEntry{1, 1, "the (2,2) entry dominates and grows under every generator"};
    detail::all_unipotent_tails(s);
    s.coefficient = Rational(1, 5);
    e.chart = ComplexAffine{};
    e.seed = ProjPoint{{0.0L, 0.5L}};
  } else if (name == "complex") {
    detail::check_keys(p, {"u"});
    Rational u = detail::param(p, "u", "1/2");
    s = build_complex_sierpinski(u);
    s.name = name;
    e.chart = ComplexAffine{};
    e.seed = ProjPoint{{0.0L, 0.5L}};
  } else if (name == "sierpinski") {
    detail::check_keys(p, {"n", "alpha"});
    Rational n = detail::param(p, "n", "3");
    if (denominator(n) != 1) throw std::invalid_argument("n must be an integer");
    s = build_real_sierpinski((int)numerator(n), detail::param(p, "alpha", "2"));
    s.name = name;
    if (s.n() == 3) {
      e.chart = detail::simplex3();
      e.seed = detail::centroid3();
    }
  } else if (name == "affine") {
    detail::check_keys(p, {"a", "b"});
    Rational a = detail::param(p, "a", "1/2"), b = detail::param(p, "b", "1/2");
    if (a <= 0 || a >= 1 || b <= 0 || b >= 1) throw std::invalid_argument("affine needs a, b in (0,1)");
    ExactScalar A(a), B(b), z(0), one(1);
    std::vector<ExactMatrix> M = {ExactMatrix{{1 - A, z, z}, {z, 1 - A, A}, {z, z, one}},
                                  ExactMatrix{{B, z, z}, {z, A, z}, {z, z, one}},
                                  ExactMatrix{{1 - B, 1 - A - B, B}, {z, A, z}, {z, z, one}}};
    for (auto& m : M) {
      m.set_scale(ScaleFactor(1 / m.entry_det().re(), 1, 3));
      s.generators.push_back(m);
    }
    // Entries of every M_I stay in [0,1] with the (3,3) entry equal to 1, and every scale is >= 1.
    s.certificate.monotone = DominantEntry{2, 2, "upper triangular products keep entries in [0,1], (3,3) entry 1"};
    e.closed_form = ClosedFormFamily::affine((long double)to_ld(a), (long double)to_ld(b));
    e.chart = RealAffine{2, 3, {}};
    e.seed = ProjPoint{{0.25L, 0.25L}};
  } else if (name == "triangular") {
    detail::check_keys(p, {"rho"});
    std::string r = p.count("rho") ? p.at("rho") : "2:2";
    std::vector<Rational> rho;
    for (std::size_t st = 0;;) {
      auto c = r.find(':', st);
      rho.push_back(parse_rational(r.substr(st, c == std::string::npos ? std::string::npos : c - st)));
      if (c == std::string::npos) break;
      st = c + 1;
    }
    if (rho.size() < 2) throw std::invalid_argument("triangular needs at least two rho values");
    std::vector<long double> rl;
    int m = (int)rho.size();
    for (int k = 0; k < m; ++k) {
      if (rho[k] <= 1) throw std::invalid_argument("triangular needs rho > 1");
      // beta_k / (1 - alpha) <= 1 keeps the off-diagonal entry below 1.
      Rational beta = Rational(k, 2 * (m - 1));
      ExactScalar R(rho[k]);
      s.generators.push_back(ExactMatrix{{R * ExactScalar(Rational(1, 2)), R * ExactScalar(beta)}, {ExactScalar(0), R}});
      rl.push_back(to_ld(rho[k]));
    }
    // Left multiplication sends (a, b, d) to rho (a/2, b/2 + beta d, d) with beta <= 1/2.
    s.certificate.monotone = DominantEntry{1, 1, "(2,2) entry is the rho product, dominates and grows"};
    for (int h = 1; h <= m; ++h)
      for (int t = 1; t <= m; ++t)
        if (h != t) s.tails[{h, t}] = TailModel{TailModel::Kind::Geometric, Rational(1), false};
    // ratio is exactly rho_t, the smallest is a valid lambda only if > 1
    for (auto& [k, tm] : s.tails) tm.lambda = rho[k.second - 1];
    e.closed_form = ClosedFormFamily::triangular(rl);
  } else {
    throw UnknownGasket("unknown gasket '" + name + "'");
  }
  validate(s);
  return e;
}

inline GasketSpec get_spec(const std::string& name, const Params& p = {}) { return get(name, p).spec; }

inline std::vector<BigInt> big(std::initializer_list<const char*> xs) {
  std::vector<BigInt> v;
  for (auto x : xs) v.emplace_back(x);
  return v;
}

inline References references(std::string name) {
  if (name == "A3") name = "apollonian";
  References r;
  if (name == "C2") {
    r.table = big({"3", "15", "71", "287", "1231", "4911", "19831", "79279", "318383", "1273807", "5098247", "20391887",
                   "81590055"});
    r.exponent = 2.0;
    r.where = "table of N(2^p), row C2; exponent 2 proven";
  } else if (name == "C3") {
    r.table = big({"4", "22", "148", "760", "4594", "24646", "136372", "740650", "4046188"});
    r.exponent = 2.444;
    r.dimension = 1.72;
    r.where = "table of N(2^p), row C3; fitted exponent and box dimension of the cubic gasket";
  } else if (name == "C4") {
    r.table = big({"5", "37", "293", "2197", "15125", "103669", "714245", "4849045"});
    r.where = "table of N(2^p), row C4";
  } else if (name == "F") {
    r.table = big({"2", "7", "16", "34", "84", "151", "348", "679", "1546", "3034", "6546", "13476", "28409", "59578",
                   "122139"});
    r.where = "table of N(2^p), row F";
  } else if (name == "apollonian") {
    r.table = big({"3", "12", "64", "316", "1784", "10004", "58224", "341386", "2033906", "12170708", "73208110",
                   "441772966", "267292497"});
    r.exponent = 2.61;
    r.dimension = 1.305;
    r.where = "table of N(2^p), row A3 (last entry suspected typo); limit-set figure, u=1/5";
  } else if (name == "hirst") {
    r.table = big({"0",           "1",           "3",           "8",           "18",          "48",
                   "113",         "278",         "681",         "1722",        "4238",        "10488",
                   "25927",       "64086",       "158266",      "391062",      "967315",      "2390800",
                   "5909752",     "14608522",    "36115118",    "89275994",    "220684802",   "545546400",
                   "1348603780",  "3333755028",  "8241076212",  "20372155276", "50360227721", "124491161884",
                   "307744098990", "760747405278", "1880578271904", "4648814463680", "11491932849933",
                   "28408221038996", "70225503797745", "173598409768852", "429137646728801"});
    r.exponent = 1.30568673;
    r.where = "table of N(2^p), row H, with the curvature functional; Apollonian exponent";
  } else if (name == "complex") {
    r.exponent = 2 * std::log2(3.0);
    r.dimension = std::log2(3.0);
    r.where = "u=1/2 standard complex Sierpinski gasket";
  } else if (name == "sierpinski") {
    r.dimension = std::log2(3.0);
    r.where = "alpha=2 standard Sierpinski gasket";
  } else if (name == "affine") {
    r.exponent = 1.5 * std::log2(3.0);
    r.where = "a=b=1/2 closed form";
  } else if (name == "B") {
    r.exponent = 1 / (2 * std::log2((1 + std::sqrt(5.0)) / 2));
    r.where = "golden-ratio growth of B1^k";
  } else if (name == "triangular") {
    r.exponent = 1.0;
    r.where = "rho=(2,2): 2*2^-s = 1";
  } else if (name == "C2alpha") {
    r.exponent = 2.0;
    r.where = "exponent 2 for alpha in (1,2)";
  } else {
    throw UnknownGasket("unknown gasket '" + name + "'");
  }
  return r;
}

}  // namespace gasket::catalog
