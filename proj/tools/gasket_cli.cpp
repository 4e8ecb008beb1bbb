#include "gasket/gasket.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <iostream>

using json = nlohmann::json;
using namespace gasket;

namespace {

enum Exit { kOk = 0, kUsage = 1, kCertificate = 2, kBudget = 3 };

struct Usage : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

catalog::Params parse_params(const std::string& s) {
  catalog::Params p;
  std::size_t st = 0;
  while (st < s.size()) {
    auto c = s.find(',', st);
    std::string kv = s.substr(st, c == std::string::npos ? std::string::npos : c - st);
    auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw Usage("bad parameter '" + kv + "', expected key=value");
    p[kv.substr(0, eq)] = kv.substr(eq + 1);
    if (c == std::string::npos) break;
    st = c + 1;
  }
  return p;
}

std::pair<double, double> parse_pair(const std::string& s, char sep) {
  auto c = s.find(sep);
  if (c == std::string::npos) throw Usage("expected two values separated by '" + std::string(1, sep) + "': " + s);
  try {
    return {std::stod(s.substr(0, c)), std::stod(s.substr(c + 1))};
  } catch (const std::exception&) {
    throw Usage("bad number pair: " + s);
  }
}

std::string str(const Rational& r) { return r.str(); }

json params_json(const catalog::Params& p) {
  json j = json::object();
  for (auto& [k, v] : p) j[k] = v;
  return j;
}

std::string certificate_name(const Certificate& c) {
  std::string s = std::visit(
      [](auto&& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, NoCertificate>) return "none";
        if constexpr (std::is_same_v<T, PermutationDominance>) return "permutation-dominance";
        if constexpr (std::is_same_v<T, DominantEntry>)
          return "dominant-entry(" + std::to_string(x.row + 1) + "," + std::to_string(x.col + 1) + ")";
        return "";
      },
      c.monotone);
  if (c.envelope) s += "+envelope(" + norm_name(c.envelope->search) + ",c1=" + c.envelope->c1.str() + ")";
  return s;
}

// Everything a subcommand needs to assemble the common document.
struct Doc {
  json j;
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

  explicit Doc(const std::string& command) {
    j["command"] = command;
    j["params"] = json::object();
    j["results"] = json::object();
    j["certified"] = false;
  }
  void print() {
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    j["timings"] = {{"seconds", secs}};
    std::cout << j.dump(2) << "\n";
  }
};

std::string csv_count(const CountTable& t) {
  std::string out = "p,count\n";
  for (auto& [p, c] : t.rows) out += std::to_string(p) + "," + c.str() + "\n";
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Counting, exponents and geometry of matrix gaskets"};
  app.require_subcommand(1);

  unsigned threads = 0;
  std::uint64_t budget = EngineOptions{}.budget;
  std::string format = "json";
  app.add_option("--threads", threads, "worker threads (default: GASKET_THREADS or all cores)");
  app.add_option("--budget", budget, "visited-node budget");
  app.add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  std::string gasket_name, params_s, window_s, bracket_s = "0:16", seed_s, out_s, in_s, depths_s, family;
  int pmax = 0, kmax = 8, depth = 0, jmin = 4, jmax = 9;
  bool nonstrict = false, from_refs = false;
  std::string kappa_s, c_s;

  auto* cat = app.add_subcommand("catalog", "built-in gasket families");
  cat->require_subcommand(1);
  auto* cat_list = cat->add_subcommand("list", "list families as JSON");

  auto add_gasket = [&](CLI::App* c) {
    c->add_option("--gasket", gasket_name, "family name")->required();
    c->add_option("--params", params_s, "family parameters k=v,k=v");
  };

  auto* count = app.add_subcommand("count", "N(2^p) for p = 1..pmax");
  add_gasket(count);
  count->add_option("--pmax", pmax)->required()->check(CLI::PositiveNumber);
  count->add_flag("--nonstrict", nonstrict, "count norm <= 2^p instead of <");

  auto* expo = app.add_subcommand("exponent", "exponent estimates and bounds");
  expo->require_subcommand(1);
  auto* fit = expo->add_subcommand("fit", "least-squares slope of log2 N(2^p)");
  add_gasket(fit);
  fit->add_option("--pmax", pmax)->check(CLI::PositiveNumber);
  fit->add_option("--window", window_s, "p range a:b");
  fit->add_flag("--from-references", from_refs, "fit the stored reference table instead of counting");
  auto* bounds = expo->add_subcommand("bounds", "certified lower and upper bounds");
  add_gasket(bounds);
  bounds->add_option("--kappa", kappa_s)->required();
  bounds->add_option("--c", c_s, "fastness coefficient (default: the pinned one)");
  auto* closed = expo->add_subcommand("closed-form", "root of an explicit exponent equation");
  closed->add_option("--family", family)->required()->check(CLI::IsMember({"triangular", "affine", "fl1", "fl2"}));
  closed->add_option("--params", params_s);
  auto* xi = expo->add_subcommand("xi", "root of the k-th root of level sums");
  add_gasket(xi);
  xi->add_option("--kmax", kmax)->check(CLI::PositiveNumber);
  xi->add_option("--s-bracket", bracket_s);

  auto* orbit = app.add_subcommand("orbit", "orbit cloud of a point");
  add_gasket(orbit);
  orbit->add_option("--depth", depth)->required()->check(CLI::NonNegativeNumber);
  orbit->add_option("--seed", seed_s, "x,y in the chart (default: catalog seed)");
  orbit->add_option("--out", out_s, "FILE.csv or FILE.svg")->required();

  auto* boxdim = app.add_subcommand("boxdim", "box-counting dimension of a CSV cloud");
  boxdim->add_option("--in", in_s)->required();
  boxdim->add_option("--jmin", jmin);
  boxdim->add_option("--jmax", jmax);

  auto* coeff = app.add_subcommand("coeff", "sampled fastness coefficient");
  add_gasket(coeff);
  coeff->add_option("--depths", depths_s, "dI,dJ")->required();

  auto* dedup = app.add_subcommand("dedup", "pairs of words with equal matrices");
  add_gasket(dedup);
  dedup->add_option("--depth", depth)->required()->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  EngineOptions opt;
  opt.threads = threads;
  opt.budget = budget;

  try {
    auto params = (!params_s.empty() && !closed->parsed()) ? parse_params(params_s) : catalog::Params{};
    auto entry = [&] {
      try {
        return catalog::get(gasket_name, params);
      } catch (const CertificateFailure&) {
        throw;
      } catch (const std::invalid_argument& e) {
        throw Usage(e.what());
      }
    };

    if (cat_list->parsed()) {
      Doc d("catalog list");
      json arr = json::array();
      for (auto& name : catalog::list()) {
        auto e = catalog::get(name);
        json x = {{"name", name},
                  {"description", catalog::describe(name)},
                  {"m", e.spec.m()},
                  {"n", e.spec.n()},
                  {"norm", norm_name(e.spec.norm)},
                  {"certificate", certificate_name(e.spec.certificate)}};
        x["coefficient"] = e.spec.coefficient ? json(str(*e.spec.coefficient)) : json(nullptr);
        arr.push_back(x);
      }
      d.j["results"]["families"] = arr;
      d.print();
      return kOk;
    }

    if (count->parsed()) {
      auto e = entry();
      Doc d("count");
      auto t = count_table(e.spec, pmax, !nonstrict, opt);
      if (format == "csv") {
        std::cout << csv_count(t);
        return kOk;
      }
      d.j["params"] = {{"gasket", gasket_name}, {"family_params", params_json(params)}, {"pmax", pmax},
                       {"strict", !nonstrict}};
      json rows = json::array();
      for (auto& [p, c] : t.rows) rows.push_back({{"p", p}, {"count", c.str()}});
      d.j["results"] = {{"rows", rows}, {"nodes_visited", t.nodes_visited}, {"mode", t.mode}};
      d.j["certified"] = t.certified;
      d.print();
      return kOk;
    }

    if (fit->parsed()) {
      auto e = entry();
      Doc d("exponent fit");
      std::optional<std::pair<int, int>> window;
      if (!window_s.empty()) {
        auto w = parse_pair(window_s, ':');
        window = std::pair<int, int>{(int)w.first, (int)w.second};
      }
      std::vector<std::pair<int, BigInt>> rows;
      bool certified = false;
      if (from_refs) {
        auto r = catalog::references(e.name);
        for (std::size_t i = 0; i < r.table.size(); ++i)
          if (!pmax || (int)i + 1 <= pmax) rows.push_back({(int)i + 1, r.table[i]});
        if (rows.empty()) throw Usage("no reference table for " + e.name);
      } else {
        if (pmax < 1) throw Usage("--pmax is required unless --from-references");
        auto t = count_table(e.spec, pmax, true, opt);
        rows = t.rows;
        certified = t.certified;
      }
      auto est = fit_exponent(rows, 2, window);
      d.j["params"] = {{"gasket", gasket_name}, {"family_params", params_json(params)}, {"pmax", pmax},
                       {"window", window_s}, {"from_references", from_refs}};
      d.j["results"] = {{"slope", est.slope}, {"stderr", est.stderr_}, {"p_min", est.p_min}, {"p_max", est.p_max}};
      d.j["certified"] = certified;
      d.print();
      return kOk;
    }

    if (bounds->parsed()) {
      auto e = entry();
      Doc d("exponent bounds");
      Rational kappa = parse_rational(kappa_s);
      Rational c;
      if (!c_s.empty())
        c = parse_rational(c_s);
      else if (e.spec.coefficient)
        c = *e.spec.coefficient;
      else
        throw Usage(e.name + " has no pinned coefficient; pass --c");
      auto b = bound_exponent(e.spec, kappa, c);
      d.j["params"] = {{"gasket", gasket_name}, {"family_params", params_json(params)}, {"kappa", kappa_s},
                       {"c", str(c)}};
      d.j["results"] = {{"s_lower", b.s_lower},
                        {"s_upper", std::isinf(b.s_upper) ? json("inf") : json(b.s_upper)},
                        {"truncation_terms", b.truncation_terms},
                        {"tail_bound_width", b.tail_bound_width},
                        {"families", b.families}};
      d.j["certified"] = true;
      d.print();
      return kOk;
    }

    if (closed->parsed()) {
      Doc d("exponent closed-form");
      auto p = parse_params(params_s);
      auto num = [&](const char* k) {
        if (!p.count(k)) throw Usage(std::string("missing parameter ") + k);
        return (long double)to_ld(parse_rational(p.at(k)));
      };
      ClosedFormFamily f = ClosedFormFamily::fl2(0.5);
      if (family == "triangular") {
        std::vector<long double> rho;
        std::string r = p.count("rho") ? p.at("rho") : "2:2";
        for (std::size_t st = 0;;) {
          auto c = r.find(':', st);
          rho.push_back(to_ld(parse_rational(r.substr(st, c == std::string::npos ? std::string::npos : c - st))));
          if (c == std::string::npos) break;
          st = c + 1;
        }
        f = ClosedFormFamily::triangular(rho);
      } else if (family == "affine") {
        f = ClosedFormFamily::affine(num("a"), num("b"));
      } else if (family == "fl1") {
        f = ClosedFormFamily::fl1(num("a"), num("b"));
      } else {
        f = ClosedFormFamily::fl2(num("a"));
      }
      ClosedFormRoot r;
      try {
        r = solve_closed_form(f);
      } catch (const std::invalid_argument& e) {
        throw Usage(e.what());
      }
      d.j["params"] = {{"family", family}, {"family_params", params_json(p)}};
      d.j["results"] = {{"root", r.root}, {"residual", r.residual}};
      d.print();
      return kOk;
    }

    if (xi->parsed()) {
      auto e = entry();
      Doc d("exponent xi");
      auto br = parse_pair(bracket_s, ':');
      auto r = xi_root(e.spec, kmax, br.first, br.second, opt);
      json seq = json::array();
      for (auto& [k, s] : r.sequence) seq.push_back({{"k", k}, {"root", s}});
      d.j["params"] = {{"gasket", gasket_name}, {"family_params", params_json(params)}, {"kmax", kmax},
                       {"s_bracket", bracket_s}};
      d.j["results"] = {{"root", r.root}, {"sequence", seq}};
      d.print();
      return kOk;
    }

    if (orbit->parsed()) {
      auto e = entry();
      if (!e.chart) throw Usage(e.name + " has no 2-dimensional chart for point clouds");
      Doc d("orbit");
      ProjPoint seed = *e.seed;
      if (!seed_s.empty()) {
        auto s = parse_pair(seed_s, ',');
        seed.x = {(long double)s.first, (long double)s.second};
      }
      auto cloud = orbit_cloud(e.spec, *e.chart, seed, depth, threads);
      bool svg = out_s.size() >= 4 && out_s.substr(out_s.size() - 4) == ".svg";
      bool csv = out_s.size() >= 4 && out_s.substr(out_s.size() - 4) == ".csv";
      if (!svg && !csv) throw Usage("--out must end in .csv or .svg");
      emit(cloud, svg ? CloudFormat::SVG : CloudFormat::CSV, out_s);
      d.j["params"] = {{"gasket", gasket_name}, {"family_params", params_json(params)}, {"depth", depth},
                       {"seed", {(double)seed.x[0], (double)seed.x[1]}}, {"out", out_s}};
      d.j["results"] = {{"points", cloud.points.size()},
                        {"bbox", {{"min", {cloud.lo[0], cloud.lo[1]}}, {"max", {cloud.hi[0], cloud.hi[1]}}}}};
      d.print();
      return kOk;
    }

    if (boxdim->parsed()) {
      Doc d("boxdim");
      auto cloud = read_csv(in_s);
      auto r = box_dimension(cloud, jmin, jmax);
      if (r.undersampled) std::cerr << "warning: fewer than 4 points per occupied cell at the finest scale\n";
      d.j["params"] = {{"in", in_s}, {"jmin", jmin}, {"jmax", jmax}};
      d.j["results"] = {{"slope", r.slope},         {"r_squared", r.r_squared},      {"scales", r.scales},
                        {"counts", r.counts},       {"jitter_slopes", r.jitter_slopes}, {"mean_slope", r.mean_slope},
                        {"undersampled", r.undersampled}};
      d.print();
      return kOk;
    }

    if (coeff->parsed()) {
      auto e = entry();
      Doc d("coeff");
      auto dd = parse_pair(depths_s, ',');
      auto r = fast_coefficient_sample(e.spec, (int)dd.first, (int)dd.second);
      d.j["params"] = {{"gasket", gasket_name}, {"family_params", params_json(params)}, {"depths", depths_s}};
      d.j["results"] = {{"min_ratio", (double)r.min_ratio},
                        {"argmin_I", index_str(r.argmin_i)},
                        {"argmin_J", index_str(r.argmin_j)}};
      if (e.spec.coefficient) d.j["results"]["pinned"] = str(*e.spec.coefficient);
      d.print();
      return kOk;
    }

    if (dedup->parsed()) {
      auto e = entry();
      Doc d("dedup");
      auto c = dedup_scan(e.spec, depth);
      d.j["params"] = {{"gasket", gasket_name}, {"family_params", params_json(params)}, {"depth", depth}};
      d.j["results"] = {{"collisions", c}};
      d.print();
      return kOk;
    }
  } catch (const CertificateFailure& e) {
    std::cerr << "certificate failure: " << e.what() << "\n";
    return kCertificate;
  } catch (const BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return kBudget;
  } catch (const Usage& e) {
    std::cerr << "usage: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
