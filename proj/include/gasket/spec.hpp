#pragma once

#include "norm.hpp"
#include "words.hpp"

#include <map>
#include <optional>
#include <utility>

namespace gasket {

struct NoCertificate {};
// Every generator G has sigma with G[i, sigma(i)] >= 1 and is nonnegative,
// so MaxAbs(G M) >= MaxAbs(M) for nonnegative M.
struct PermutationDominance {};
// The (row, col) entry is the max-modulus entry of every element and cannot
// shrink under left multiplication by a generator.
struct DominantEntry {
  int row;
  int col;
  std::string proof;
};
// Search with a cheaper monotone norm; target >= c1 * search.
struct Envelope {
  NormFunctional search;
  Rational c1{1};
};

struct Certificate {
  std::variant<NoCertificate, PermutationDominance, DominantEntry> monotone;
  std::optional<Envelope> envelope;

  bool present() const { return !std::holds_alternative<NoCertificate>(monotone); }
};

struct TailModel {
  enum class Kind { Unipotent2, Geometric };
  Kind kind{Kind::Unipotent2};
  Rational lambda{0};  // Geometric only
  bool validated{false};
};

struct CertificateFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GasketSpec {
  std::string name;
  std::vector<ExactMatrix> generators;
  NormFunctional norm{MaxAbs{}};
  Certificate certificate;
  std::map<std::pair<int, int>, TailModel> tails;  // (head, tail), 1-based
  std::optional<Rational> coefficient;
  // Projective maps are induced by the transposed generators (row-form families).
  bool acts_by_transpose{false};

  int m() const { return (int)generators.size(); }
  int n() const { return generators.empty() ? 0 : generators[0].n(); }

  const NormFunctional& search_norm() const {
    return certificate.envelope ? certificate.envelope->search : norm;
  }

  bool uniform_scale() const {
    for (auto& g : generators)
      if (!(g.scale() == generators[0].scale())) return false;
    return true;
  }
  bool has_scale() const {
    for (auto& g : generators)
      if (!g.scale().is_identity()) return true;
    return false;
  }
  bool is_real() const {
    for (auto& g : generators)
      if (!g.is_real()) return false;
    return true;
  }
};

inline bool is_unipotent2(const ExactMatrix& t) {
  ExactMatrix n = t;
  n.set_scale({});
  for (int i = 0; i < n.n(); ++i) n(i, i) = n(i, i) - ExactScalar(1);
  ExactMatrix sq = mat_mul(n, n);
  for (auto& x : sq.entries())
    if (!x.is_zero()) return false;
  return t.scale().is_identity();
}

// Structural checks plus the generator-level part of each certificate.
inline void validate(const GasketSpec& s) {
  if (s.generators.empty()) throw std::invalid_argument(s.name + ": no generators");
  for (auto& g : s.generators) {
    if (g.n() != s.n()) throw std::invalid_argument(s.name + ": generators differ in dimension");
    if (s.certificate.present() && !g.scale().is_identity() && g.scale().to_ld() < 1)
      throw std::invalid_argument(s.name + ": certified spec with a shrinking scale");
  }
  if (s.certificate.envelope && s.certificate.envelope->c1 <= 0)
    throw std::invalid_argument(s.name + ": envelope constant must be positive");
  if (std::holds_alternative<PermutationDominance>(s.certificate.monotone)) {
    if (!std::holds_alternative<MaxAbs>(s.search_norm()))
      throw CertificateFailure(s.name + ": permutation dominance needs a MaxAbs search norm");
    for (auto& g : s.generators) {
      if (!g.is_nonnegative()) throw CertificateFailure(s.name + ": permutation dominance needs nonnegative generators");
      if (!dominating_permutation(g)) throw CertificateFailure(s.name + ": generator without dominating permutation");
    }
  }
  if (auto* d = std::get_if<DominantEntry>(&s.certificate.monotone)) {
    if (d->row < 0 || d->col < 0 || d->row >= s.n() || d->col >= s.n())
      throw std::invalid_argument(s.name + ": dominant entry out of range");
    if (!std::holds_alternative<MaxAbs>(s.search_norm()))
      throw CertificateFailure(s.name + ": dominant entry needs a MaxAbs search norm");
  }
  for (auto& [k, tm] : s.tails) {
    if (k.first == k.second || k.first < 1 || k.second < 1 || k.first > s.m() || k.second > s.m())
      throw std::invalid_argument(s.name + ": bad tail model key");
    if (tm.kind == TailModel::Kind::Unipotent2 && !is_unipotent2(s.generators[k.second - 1]))
      throw std::invalid_argument(s.name + ": tail generator is not unipotent of index 2");
  }
}

}  // namespace gasket
