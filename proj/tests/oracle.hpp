#pragma once
// Exhaustive word enumeration used as an independent check of the pruned engine.
// Every word up to a fixed depth is multiplied out in doubles; values that land
// within 1e-9 of a threshold are re-decided exactly.

#include <gasket/gasket.hpp>

#include <array>
#include <complex>
#include <optional>

namespace oracle {

using namespace gasket;

struct Result {
  int depth{0};                            // deepest level enumerated
  std::vector<std::vector<std::uint64_t>> below;  // below[k][p]: words of length k with norm < 2^p
  std::uint64_t ties{0};
  // N(2^p) if some level <= depth has no word below 2^p, else nullopt.
  std::optional<std::uint64_t> count(int p) const {
    std::uint64_t acc = 0;
    for (int k = 0; k <= depth; ++k) {
      if (below[k][p] == 0) return acc;
      acc += below[k][p];
    }
    return std::nullopt;
  }
};

// Largest depth whose full tree has at most `nodes` nodes.
inline int depth_for(int m, double nodes) {
  double total = 1, lvl = 1;
  int d = 0;
  while (true) {
    lvl *= m;
    if (total + lvl > nodes) return d;
    total += lvl;
    ++d;
  }
}

namespace detail {

template <class T, int N>
struct Enum {
  using Mat = std::array<T, N * N>;
  const GasketSpec& spec;
  int pmax, depth;
  std::vector<Mat> gens;
  double wv[N]{}, ww[N]{};
  bool bilinear{false};
  Result res;
  std::vector<int> path;
  std::vector<double> thr;

  Enum(const GasketSpec& s, int pm, int d) : spec(s), pmax(pm), depth(d) {
    for (auto& g : s.generators) {
      Mat a{};
      auto c = g.to_complex();  // scale already applied
      for (int i = 0; i < N * N; ++i) {
        if constexpr (std::is_same_v<T, double>)
          a[i] = (double)c[i].real();
        else
          a[i] = T((double)c[i].real(), (double)c[i].imag());
      }
      gens.push_back(a);
    }
    if (auto* wb = std::get_if<WeightedBilinear>(&s.norm)) {
      bilinear = true;
      for (int i = 0; i < N; ++i) {
        wv[i] = (double)wb->v[i];
        ww[i] = (double)wb->w[i];
      }
    } else if (!std::holds_alternative<MaxAbs>(s.norm)) {
      throw std::invalid_argument("oracle supports MaxAbs and bilinear norms");
    }
    for (int p = 0; p <= pmax; ++p) thr.push_back(std::ldexp(1.0, p));
    res.depth = depth;
    res.below.assign(depth + 1, std::vector<std::uint64_t>(pmax + 1, 0));
  }

  double norm(const Mat& a) const {
    double r = 0;
    if (bilinear) {
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) r += std::real(a[i * N + j]) * ww[i] * wv[j];
      return r;
    }
    for (auto& x : a) r = std::max(r, (double)std::abs(x));
    return r;
  }

  void tally(const Mat& a, int k) {
    double v = norm(a);
    auto& row = res.below[k];
    for (int p = pmax; p >= 0; --p) {
      double r = thr[p];
      if (v < r * (1 - 1e-9)) {
        ++row[p];
        continue;
      }
      if (v <= r * (1 + 1e-9)) {
        ++res.ties;
        MultiIndex w(path.rbegin(), path.rend());
        if (norm_cmp(norm_eval(spec.norm, word_matrix(spec.generators, w)), Rational(2), p) == Cmp::Less) {
          ++row[p];
          continue;
        }
      }
      break;  // v >= 2^p, so v >= 2^q for every q < p
    }
  }

  void rec(const Mat& a, int k) {
    tally(a, k);
    if (k == depth) return;
    Mat c;
    for (std::size_t g = 0; g < gens.size(); ++g) {
      const Mat& G = gens[g];
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
          T s = 0;
          for (int l = 0; l < N; ++l) s += G[i * N + l] * a[l * N + j];
          c[i * N + j] = s;
        }
      path.push_back((int)g + 1);
      rec(c, k + 1);
      path.pop_back();
    }
  }

  Result run() {
    Mat id{};
    for (int i = 0; i < N; ++i) id[i * N + i] = 1;
    rec(id, 0);
    return res;
  }
};

template <class T>
Result dispatch(const GasketSpec& s, int pmax, int depth) {
  switch (s.n()) {
    case 2: return Enum<T, 2>(s, pmax, depth).run();
    case 3: return Enum<T, 3>(s, pmax, depth).run();
    case 4: return Enum<T, 4>(s, pmax, depth).run();
  }
  throw std::invalid_argument("oracle supports n = 2..4");
}

}  // namespace detail

// Enumerate every word of length <= depth and bin by thresholds 2^0..2^pmax.
inline Result enumerate(const GasketSpec& s, int pmax, int depth) {
  return s.is_real() ? detail::dispatch<double>(s, pmax, depth) : detail::dispatch<std::complex<double>>(s, pmax, depth);
}

// Length of the longest generator power with norm < 2^p, capped at `cap`.
// Any level up to that length still has a word below 2^p.
inline int longest_power_below(const GasketSpec& s, int p, int cap) {
  int best = 0;
  for (auto& g : s.generators) {
    ExactMatrix a = g;
    int k = 1;
    while (k <= cap && norm_cmp(norm_eval(s.norm, a), Rational(2), p) == Cmp::Less) {
      a = mat_mul(g, a);
      ++k;
    }
    best = std::max(best, k - 1);
  }
  return best;
}

// Deepen until N(2^pmax) is resolved or the next depth would exceed node_cap. Thresholds whose
// generator powers alone outrun the cap are given up on up front; count() reports them unresolved.
inline Result enumerate_until(const GasketSpec& s, int pmax, double node_cap) {
  int dmax = depth_for(s.m(), node_cap);
  int target = pmax;
  while (target > 0 && longest_power_below(s, target, dmax) >= dmax) --target;
  Result r = enumerate(s, pmax, 0);
  for (int d = 1; d <= dmax && !r.count(target); ++d) r = enumerate(s, pmax, d);
  return r;
}

// The catalog instances checked against the oracle.
inline std::vector<std::pair<std::string, catalog::Params>> instances() {
  return {{"C2", {}},
          {"C3", {}},
          {"C4", {}},
          {"C2alpha", {{"alpha", "3/2"}}},
          {"hirst", {}},
          {"F", {}},
          {"B", {}},
          {"apollonian", {}},
          {"complex", {{"u", "1/2"}}},
          {"sierpinski", {{"alpha", "2"}}},
          {"sierpinski", {{"alpha", "1"}}},
          {"affine", {{"a", "1/4"}, {"b", "1/2"}}},
          {"triangular", {{"rho", "2:3"}}}};
}

}  // namespace oracle
