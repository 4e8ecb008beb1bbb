#pragma once

#include "spec.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <complex>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>
#include <type_traits>
#include <unordered_map>

namespace gasket {

struct BudgetExceeded : std::runtime_error {
  explicit BudgetExceeded(std::uint64_t b)
      : std::runtime_error("node budget of " + std::to_string(b) + " visited nodes exceeded") {}
};

struct EngineOptions {
  unsigned threads{0};  // 0: GASKET_THREADS or hardware concurrency
  std::uint64_t budget{500000000ULL};
  int split_depth{6};
};

inline unsigned resolve_threads(unsigned requested) {
  if (requested) return requested;
  if (const char* env = std::getenv("GASKET_THREADS")) {
    int t = std::atoi(env);
    if (t > 0) return (unsigned)t;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc ? hc : 1;
}

struct CountResult {
  Rational base{2};
  long long exp{0};
  bool strict{true};
  BigInt count{0};
  std::uint64_t nodes_visited{0};
  bool certified{false};
  std::optional<std::uint64_t> collisions;
  std::string mode;
};

struct CountTable {
  Rational base{2};
  bool strict{true};
  std::vector<std::pair<int, BigInt>> rows;
  std::uint64_t nodes_visited{0};
  bool certified{false};
  std::string mode;
};

namespace detail {

template <class T>
struct is_gaussian : std::false_type {};
template <class T>
struct is_gaussian<Gaussian<T>> : std::true_type {};

template <class R>
struct component {
  using type = R;
};
template <class T>
struct component<Gaussian<T>> {
  using type = T;
};

template <class C>
C from_big(const BigInt& b) {
  if constexpr (std::is_same_v<C, BigInt>) {
    return b;
  } else {
    if (b > std::numeric_limits<std::int64_t>::max() || b < std::numeric_limits<std::int64_t>::min()) throw Overflow();
    return (std::int64_t)b;
  }
}

template <class C>
BigInt to_big(const C& c) {
  return BigInt(c);
}

// a*b < c*d without overflow.
inline bool lt_prod(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d) {
  return (__int128)a * b < (__int128)c * d;
}
inline bool lt_prod(const BigInt& a, const BigInt& b, const BigInt& c, const BigInt& d) { return a * b < c * d; }

template <class R>
typename component<R>::type magnitude(const R& x) {
  if constexpr (is_gaussian<R>::value)
    return x.norm_sq();
  else
    return arith::abs(x);
}

// Generators as integer (or Gaussian integer) numerators over one denominator.
inline std::pair<std::vector<Gaussian<BigInt>>, BigInt> integral_form(const ExactMatrix& g) {
  BigInt den = 1;
  for (auto& x : g.entries()) {
    den = boost::multiprecision::lcm(den, boost::multiprecision::denominator(x.re()));
    den = boost::multiprecision::lcm(den, boost::multiprecision::denominator(x.im()));
  }
  std::vector<Gaussian<BigInt>> num;
  for (auto& x : g.entries()) {
    Rational re = x.re() * den, im = x.im() * den;
    num.push_back({boost::multiprecision::numerator(re), boost::multiprecision::numerator(im)});
  }
  return {num, den};
}

struct Bins {
  std::vector<std::uint64_t> hist;
  std::uint64_t visited{0};
};

// Pruned depth-first counter over a fixed dimension N and ring R.
template <class R, int N>
class FastCounter {
 public:
  using C = typename component<R>::type;
  static constexpr bool kSquared = is_gaussian<R>::value;

  struct Node {
    std::array<R, N * N> a;
    C den;
    C parent_search;  // search magnitude of the parent (DominantEntry check)
    C parent_den;
    int depth;
  };

  FastCounter(const GasketSpec& spec, const std::vector<BigInt>& thresholds, bool strict, const EngineOptions& opt)
      : spec_(spec), strict_(strict), opt_(opt) {
    for (auto& g : spec.generators) {
      auto [num, den] = integral_form(g);
      std::array<R, N * N> a{};
      for (int i = 0; i < N * N; ++i) {
        if constexpr (is_gaussian<R>::value)
          a[i] = R(from_big<C>(num[i].re), from_big<C>(num[i].im));
        else
          a[i] = from_big<C>(num[i].re);
      }
      gens_.push_back(a);
      gden_.push_back(from_big<C>(den));
    }
    for (auto& t : thresholds) tk_.push_back(from_big<C>(kSquared ? BigInt(t * t) : t));
    if (spec.certificate.envelope) {
      const Rational& c1 = spec.certificate.envelope->c1;
      BigInt cn = boost::multiprecision::numerator(c1), cd = boost::multiprecision::denominator(c1);
      env_cn_ = from_big<C>(cn);
      env_cd_ = from_big<C>(cd);
      BigInt t = thresholds.back() * cd;
      search_k_ = from_big<C>(kSquared ? BigInt(t * t) : t);
      search_f_ = from_big<C>(kSquared ? BigInt(cn * cn) : cn);
    } else {
      env_cn_ = 1;
      env_cd_ = 1;
      search_k_ = tk_.back();
      search_f_ = 1;
    }
    if (auto* d = std::get_if<DominantEntry>(&spec.certificate.monotone)) dominant_ = d->row * N + d->col;
    envelope_ = spec.certificate.envelope.has_value();
    if (auto* wb = std::get_if<WeightedBilinear>(&spec.norm)) {
      for (int i = 0; i < N; ++i) {
        wv_[i] = wb->v[i];
        ww_[i] = wb->w[i];
      }
    }
    target_kind_ = spec.norm.index();
    search_kind_ = spec.search_norm().index();
  }

  Bins run() {
    Node root{};
    for (int i = 0; i < N; ++i) root.a[i * N + i] = R(C(1));
    root.den = 1;
    root.parent_search = 0;
    root.parent_den = 1;
    root.depth = 0;

    // Shallow levels on this thread; nodes at split_depth become tasks.
    std::vector<Node> tasks;
    Bins main = make_bins();
    {
      std::vector<Node> stack{root};
      while (!stack.empty()) {
        Node x = std::move(stack.back());
        stack.pop_back();
        if (x.depth >= opt_.split_depth) {
          tasks.push_back(std::move(x));
          continue;
        }
        visit(x, main, stack);
      }
    }
    visited_.fetch_add(main.visited);

    unsigned nt = std::max(1u, std::min<unsigned>(resolve_threads(opt_.threads), (unsigned)std::max<std::size_t>(1, tasks.size())));
    std::vector<Bins> per(tasks.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> abort{false};
    std::exception_ptr err;
    std::mutex err_mu;
    auto worker = [&] {
      try {
        while (!abort.load(std::memory_order_relaxed)) {
          std::size_t t = next.fetch_add(1);
          if (t >= tasks.size()) break;
          Bins b = make_bins();
          std::vector<Node> stack{tasks[t]};
          std::uint64_t flushed = 0;
          while (!stack.empty()) {
            Node x = std::move(stack.back());
            stack.pop_back();
            visit(x, b, stack);
            if (b.visited - flushed >= 4096) {
              std::uint64_t tot = visited_.fetch_add(b.visited - flushed) + (b.visited - flushed);
              flushed = b.visited;
              if (tot > opt_.budget) throw BudgetExceeded(opt_.budget);
              if (abort.load(std::memory_order_relaxed)) return;
            }
          }
          visited_.fetch_add(b.visited - flushed);
          per[t] = std::move(b);
        }
      } catch (...) {
        std::lock_guard<std::mutex> lk(err_mu);
        if (!err) err = std::current_exception();
        abort = true;
      }
    };
    if (nt == 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (unsigned i = 0; i < nt; ++i) pool.emplace_back(worker);
      for (auto& th : pool) th.join();
    }
    if (err) std::rethrow_exception(err);
    if (visited_.load() > opt_.budget) throw BudgetExceeded(opt_.budget);
    for (auto& b : per)
      for (std::size_t i = 0; i < b.hist.size(); ++i) main.hist[i] += b.hist[i];
    main.visited = visited_.load();
    return main;
  }

 private:
  Bins make_bins() const {
    Bins b;
    b.hist.assign(tk_.size(), 0);
    return b;
  }

  C eval(std::size_t kind, const Node& x) const {
    // kinds follow NormFunctional: 0 MaxAbs, 1 RowSumInf, 2 EntrySumL1, 3 WeightedBilinear
    switch (kind) {
      case 0: {
        C m = 0;
        for (auto& e : x.a) {
          C v = magnitude(e);
          if (m < v) m = v;
        }
        return m;
      }
      case 1: {
        C m = 0;
        for (int i = 0; i < N; ++i) {
          C s = 0;
          for (int j = 0; j < N; ++j) s = arith::add(s, magnitude(x.a[i * N + j]));
          if (m < s) m = s;
        }
        return m;
      }
      case 2: {
        C s = 0;
        for (auto& e : x.a) s = arith::add(s, magnitude(e));
        return s;
      }
      default: {
        C s = 0;
        if constexpr (!is_gaussian<R>::value) {
          for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j)
              s = arith::add(s, arith::mul(x.a[i * N + j], C(arith::mul(std::int64_t(ww_[i]), std::int64_t(wv_[j])))));
        }
        if (s <= 0) throw NormError("bilinear norm is not positive");
        return s;
      }
    }
  }

  C den_power(const C& den) const {
    if (den == 1) return C(1);
    return kSquared ? C(arith::mul(den, den)) : den;
  }

  void visit(const Node& x, Bins& b, std::vector<Node>& stack) {
    ++b.visited;
    C dp = den_power(x.den);
    C search = eval(search_kind_, x);

    if (dominant_ >= 0) {
      C d = magnitude(x.a[dominant_]);
      for (auto& e : x.a)
        if (d < magnitude(e)) throw CertificateFailure("dominant entry assertion failed");
      // child >= parent: search/dp >= parent/parent_dp
      if (x.depth > 0 && lt_prod(search, den_power(x.parent_den), x.parent_search, dp))
        throw CertificateFailure("dominant entry growth assertion failed");
    }

    C target = envelope_ ? eval(target_kind_, x) : search;
    if (envelope_ && lt_prod(target, env_cd_, env_cn_, search))
      throw CertificateFailure("envelope assertion target >= c1*search failed");

    // prune: search >= T/c1 (strict) or search > T/c1
    bool out = strict_ ? !lt_prod(search, search_f_, search_k_, dp) : lt_prod(search_k_, dp, search, search_f_);
    if (out) return;

    // first threshold index with target below it
    auto below = [&](std::size_t k) {
      return strict_ ? lt_prod(target, C(1), tk_[k], dp) : !lt_prod(tk_[k], dp, target, C(1));
    };
    if (below(tk_.size() - 1)) {
      std::size_t lo = 0, hi = tk_.size() - 1;
      while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        if (below(mid))
          hi = mid;
        else
          lo = mid + 1;
      }
      ++b.hist[lo];
    }

    for (std::size_t g = 0; g < gens_.size(); ++g) {
      Node c;
      const auto& G = gens_[g];
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
          R s = R(C(0));
          for (int k = 0; k < N; ++k) {
            const R& p = G[i * N + k];
            if (p == R(C(0))) continue;
            s = s + p * x.a[k * N + j];
          }
          c.a[i * N + j] = s;
        }
      c.den = arith::mul(x.den, gden_[g]);
      if (c.den != 1) reduce(c);
      c.parent_search = search;
      c.parent_den = x.den;
      c.depth = x.depth + 1;
      stack.push_back(std::move(c));
    }
  }

  static void reduce(Node& c) {
    C g = c.den;
    for (auto& e : c.a) {
      if (g == 1) return;
      if constexpr (is_gaussian<R>::value) {
        g = arith::gcd(g, e.re);
        g = arith::gcd(g, e.im);
      } else {
        g = arith::gcd(g, e);
      }
    }
    if (g == 1) return;
    for (auto& e : c.a) {
      if constexpr (is_gaussian<R>::value) {
        e.re /= g;
        e.im /= g;
      } else {
        e /= g;
      }
    }
    c.den /= g;
  }

  const GasketSpec& spec_;
  bool strict_;
  EngineOptions opt_;
  std::vector<std::array<R, N * N>> gens_;
  std::vector<C> gden_;
  std::vector<C> tk_;
  C env_cn_, env_cd_, search_k_, search_f_;
  int dominant_{-1};
  bool envelope_{false};
  std::array<long long, N> wv_{}, ww_{};
  std::size_t target_kind_{0}, search_kind_{0};
  std::atomic<std::uint64_t> visited_{0};
};

template <class R>
Bins run_fast_dim(const GasketSpec& spec, const std::vector<BigInt>& th, bool strict, const EngineOptions& opt) {
  switch (spec.n()) {
    case 1: return FastCounter<R, 1>(spec, th, strict, opt).run();
    case 2: return FastCounter<R, 2>(spec, th, strict, opt).run();
    case 3: return FastCounter<R, 3>(spec, th, strict, opt).run();
    case 4: return FastCounter<R, 4>(spec, th, strict, opt).run();
    case 5: return FastCounter<R, 5>(spec, th, strict, opt).run();
    case 6: return FastCounter<R, 6>(spec, th, strict, opt).run();
    default: throw std::invalid_argument("fast engine supports dimensions 1..6");
  }
}

inline bool fast_eligible(const GasketSpec& spec, const Rational& base, const std::vector<long long>& exps) {
  if (!spec.certificate.present() || spec.has_scale() || spec.n() > 6) return false;
  if (boost::multiprecision::denominator(base) != 1 || base < 1) return false;
  for (auto e : exps)
    if (e < 0) return false;
  if (!spec.is_real() && !std::holds_alternative<MaxAbs>(spec.norm)) return false;
  return true;
}

// Exact enumeration for scaled or uncertified specs. Scales are tracked as
// B = S^L for L the lcm of the exponent denominators, so norm comparisons
// stay rational. Pruning is used only with a certificate and scales >= 1;
// otherwise words are enumerated length by length until a whole length has
// nothing below the largest threshold (not a proof, reported uncertified).
inline Bins run_generic(const GasketSpec& spec, const Rational& base, const std::vector<long long>& exps, bool strict,
                        const EngineOptions& opt, bool& certified) {
  Bins b;
  b.hist.assign(exps.size(), 0);
  long long L = 1;
  for (auto& g : spec.generators)
    if (!g.scale().is_identity()) L = std::lcm(L, g.scale().exp_den);
  std::vector<ExactMatrix> gens;
  std::vector<Rational> gb;
  bool scale_ok = true;
  for (auto& g : spec.generators) {
    ExactMatrix u = g;
    u.set_scale({});
    gens.push_back(u);
    const ScaleFactor& sc = g.scale();
    Rational bi = sc.is_identity() ? Rational(1) : rational_pow(sc.base, sc.exp_num * (L / sc.exp_den));
    if (bi < 1) scale_ok = false;
    gb.push_back(bi);
  }
  bool prune = spec.certificate.present() && scale_ok;
  certified = prune;
  const long long tmax = exps.back();
  const Rational c1 = spec.certificate.envelope ? spec.certificate.envelope->c1 : Rational(1);
  const auto* dom = std::get_if<DominantEntry>(&spec.certificate.monotone);

  // m^(1/a) * B^(1/L) * f  vs  base^e  <=>  m^L * B^a * f^(aL)  vs  base^(e a L)
  auto cmp = [&](const NormValue& v, const Rational& B, const Rational& f, long long e) {
    long long a = v.squared ? 2 : 1;
    Rational lhs = rational_pow(v.magnitude, L) * rational_pow(B, a) * rational_pow(f, a * L);
    return compare(lhs, rational_pow(base, e * a * L));
  };
  auto below = [&](Cmp c) { return strict ? c == Cmp::Less : c != Cmp::Greater; };
  auto tally = [&](const NormValue& t, const Rational& B) {
    if (!below(cmp(t, B, 1, tmax))) return false;
    for (std::size_t k = 0; k < exps.size(); ++k)
      if (below(cmp(t, B, 1, exps[k]))) {
        ++b.hist[k];
        break;
      }
    return true;
  };
  auto check_dominant = [&](const ExactMatrix& x, const Rational& parent) {
    Rational d = x(dom->row, dom->col).norm_sq();
    for (auto& e : x.entries())
      if (e.norm_sq() > d) throw CertificateFailure(spec.name + ": dominant entry is not maximal at a visited node");
    if (d < parent) throw CertificateFailure(spec.name + ": dominant entry shrinks at a visited node");
    return d;
  };

  struct Item {
    ExactMatrix m;
    Rational B;
    int depth;
    Rational dom;
  };
  auto tick = [&] {
    if (++b.visited > opt.budget) throw BudgetExceeded(opt.budget);
  };

  if (prune) {
    std::vector<Item> stack{{ExactMatrix::identity(spec.n()), Rational(1), 0, Rational(0)}};
    while (!stack.empty()) {
      Item it = std::move(stack.back());
      stack.pop_back();
      tick();
      Rational d = dom ? check_dominant(it.m, it.dom) : Rational(0);
      tally(norm_eval(spec.norm, it.m), it.B);
      NormValue sv = norm_eval(spec.search_norm(), it.m);
      if (!below(cmp(sv, it.B, c1, tmax))) continue;
      for (std::size_t g = 0; g < gens.size(); ++g)
        stack.push_back({mat_mul(gens[g], it.m), it.B * gb[g], it.depth + 1, d});
    }
    return b;
  }

  for (int len = 0;; ++len) {
    bool any = false;
    std::vector<Item> stack{{ExactMatrix::identity(spec.n()), Rational(1), 0, Rational(0)}};
    while (!stack.empty()) {
      Item it = std::move(stack.back());
      stack.pop_back();
      tick();
      if (it.depth == len) {
        any = tally(norm_eval(spec.norm, it.m), it.B) || any;
        continue;
      }
      for (std::size_t g = 0; g < gens.size(); ++g)
        stack.push_back({mat_mul(gens[g], it.m), it.B * gb[g], it.depth + 1, Rational(0)});
    }
    if (!any) break;
  }
  return b;
}

inline Bins run_counts(const GasketSpec& spec, const Rational& base, const std::vector<long long>& exps, bool strict,
                       const EngineOptions& opt, bool& certified, std::string& mode) {
  validate(spec);
  if (exps.empty()) throw std::invalid_argument("no thresholds");
  if (fast_eligible(spec, base, exps)) {
    std::vector<BigInt> th;
    BigInt bb = boost::multiprecision::numerator(base);
    for (auto e : exps) th.push_back(boost::multiprecision::pow(bb, (unsigned)e));
    certified = true;
    bool complex = !spec.is_real();
    try {
      mode = "int64";
      return complex ? run_fast_dim<Gaussian<std::int64_t>>(spec, th, strict, opt)
                     : run_fast_dim<std::int64_t>(spec, th, strict, opt);
    } catch (const Overflow&) {
      mode = "bigint";
      return complex ? run_fast_dim<Gaussian<BigInt>>(spec, th, strict, opt) : run_fast_dim<BigInt>(spec, th, strict, opt);
    }
  }
  mode = spec.certificate.present() ? "exact-pruned" : "exact-levels";
  return run_generic(spec, base, exps, strict, opt, certified);
}

}  // namespace detail

// #{words I (empty word included) with norm(A_I) < base^exp}, or <= when !strict.
inline CountResult count_below(const GasketSpec& spec, const Rational& base, long long exp, bool strict = true,
                               const EngineOptions& opt = {}) {
  CountResult r;
  r.base = base;
  r.exp = exp;
  r.strict = strict;
  detail::Bins b = detail::run_counts(spec, base, {exp}, strict, opt, r.certified, r.mode);
  r.count = b.hist[0];
  r.nodes_visited = b.visited;
  return r;
}

// Rows p = 1..pmax of N(base^p), from a single traversal at the largest threshold.
inline CountTable count_table(const GasketSpec& spec, int pmax, bool strict = true, const EngineOptions& opt = {},
                              const Rational& base = 2) {
  if (pmax < 1) throw std::invalid_argument("pmax must be >= 1");
  std::vector<long long> exps;
  for (int p = 0; p <= pmax; ++p) exps.push_back(p);
  CountTable t;
  t.base = base;
  t.strict = strict;
  detail::Bins b = detail::run_counts(spec, base, exps, strict, opt, t.certified, t.mode);
  BigInt acc = 0;
  for (int p = 0; p <= pmax; ++p) {
    acc += b.hist[p];
    if (p >= 1) t.rows.push_back({p, acc});
  }
  t.nodes_visited = b.visited;
  return t;
}

// Depth-first walk over all words of length <= max_depth with exact matrices.
// visit(word, matrix) returns false to skip the subtree.
template <class F>
void walk_words(const GasketSpec& spec, int max_depth, F&& visit) {
  struct Item {
    MultiIndex w;
    ExactMatrix m;
  };
  std::vector<Item> stack{{{}, ExactMatrix::identity(spec.n())}};
  while (!stack.empty()) {
    Item it = std::move(stack.back());
    stack.pop_back();
    if (!visit(it.w, it.m)) continue;
    if ((int)it.w.size() >= max_depth) continue;
    for (int g = spec.m(); g >= 1; --g) {
      MultiIndex w{g};
      w.insert(w.end(), it.w.begin(), it.w.end());
      stack.push_back({std::move(w), mat_mul(spec.generators[g - 1], it.m)});
    }
  }
}

// Norms of all m^k words of length k, in long double from exact values when
// the scale allows exact products.
inline std::vector<long double> level_norms(const GasketSpec& spec, int k, const EngineOptions& opt = {}) {
  if (k < 0) throw std::invalid_argument("k must be >= 0");
  long double total = std::pow((long double)spec.m(), (long double)k);
  if (total > (long double)opt.budget) throw BudgetExceeded(opt.budget);
  std::vector<long double> out;
  out.reserve((std::size_t)total);
  if (spec.uniform_scale()) {
    walk_words(spec, k, [&](const MultiIndex& w, const ExactMatrix& m) {
      if ((int)w.size() == k) out.push_back(norm_eval(spec.norm, m).to_ld());
      return true;
    });
    return out;
  }
  using M = std::vector<std::complex<long double>>;
  int n = spec.n();
  std::vector<M> gens;
  for (auto& g : spec.generators) gens.push_back(g.to_complex());
  std::function<void(const M&, int)> rec = [&](const M& x, int d) {
    if (d == k) {
      long double mx = 0;
      for (auto& z : x) mx = std::max(mx, std::abs(z));
      out.push_back(mx);
      return;
    }
    for (auto& g : gens) {
      M r(std::size_t(n) * n);
      for (int i = 0; i < n; ++i)
        for (int l = 0; l < n; ++l)
          for (int j = 0; j < n; ++j) r[i * n + j] += g[i * n + l] * x[l * n + j];
      rec(r, d + 1);
    }
  };
  M id(std::size_t(n) * n);
  for (int i = 0; i < n; ++i) id[i * n + i] = 1;
  rec(id, 0);
  return out;
}

// Neumaier-compensated sum of x^(-s).
inline long double power_sum(const std::vector<long double>& norms, long double s) {
  long double sum = 0, comp = 0;
  for (long double x : norms) {
    long double t = std::pow(x, -s);
    long double y = sum + t;
    if (std::fabs(sum) >= std::fabs(t))
      comp += (sum - y) + t;
    else
      comp += (t - y) + sum;
    sum = y;
  }
  return sum + comp;
}

inline long double level_sum(const GasketSpec& spec, int k, long double s, const EngineOptions& opt = {}) {
  if (s < 0) throw std::invalid_argument("s must be >= 0");
  return power_sum(level_norms(spec, k, opt), s);
}

// Number of distinct word pairs of length <= depth with equal matrices.
inline std::uint64_t dedup_scan(const GasketSpec& spec, int depth) {
  std::unordered_map<std::string, std::uint64_t> seen;
  walk_words(spec, depth, [&](const MultiIndex&, const ExactMatrix& m) {
    ++seen[m.str()];
    return true;
  });
  std::uint64_t c = 0;
  for (auto& [k, g] : seen) c += g * (g - 1) / 2;
  return c;
}

struct CoefficientSample {
  long double min_ratio{0};
  MultiIndex argmin_i, argmin_j;
};

// min ||A_IJ|| / (||A_I|| ||A_J||) over |I| <= depth_i and J with a
// next-to-diagonal prefix (J[0] != J[1]) and |J| <= depth_j.
// A weighted functional is not a matrix norm; such specs are sampled on their search norm.
inline CoefficientSample fast_coefficient_sample(const GasketSpec& spec, int depth_i, int depth_j) {
  if (depth_i < 1 || depth_j < 1) throw std::invalid_argument("depths must be >= 1");
  struct E {
    MultiIndex w;
    ExactMatrix m;
    long double norm;
  };
  std::vector<E> is, js;
  const NormFunctional& nrm = std::holds_alternative<WeightedBilinear>(spec.norm) ? spec.search_norm() : spec.norm;
  walk_words(spec, std::max(depth_i, depth_j), [&](const MultiIndex& w, const ExactMatrix& m) {
    long double nv = norm_eval(nrm, m).to_ld();
    if ((int)w.size() <= depth_i) is.push_back({w, m, nv});
    if ((int)w.size() <= depth_j && w.size() >= 2 && w[0] != w[1]) js.push_back({w, m, nv});
    return true;
  });
  CoefficientSample best;
  best.min_ratio = std::numeric_limits<long double>::infinity();
  for (auto& i : is)
    for (auto& j : js) {
      long double r = norm_eval(nrm, mat_mul(i.m, j.m)).to_ld() / (i.norm * j.norm);
      if (r < best.min_ratio) {
        best.min_ratio = r;
        best.argmin_i = i.w;
        best.argmin_j = j.w;
      }
    }
  return best;
}

}  // namespace gasket
