#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace gasket {

// Symbols are 1..m; the empty index is the root.
using MultiIndex = std::vector<int>;

inline MultiIndex parse_index(const std::string& s) {
  MultiIndex out;
  for (char c : s) {
    if (c < '1' || c > '9') throw std::invalid_argument("bad index symbol in " + s);
    out.push_back(c - '0');
  }
  return out;
}

inline std::string index_str(const MultiIndex& i) {
  if (i.empty()) return "0";
  std::string s;
  for (int x : i) s += (x < 10 ? std::to_string(x) : "(" + std::to_string(x) + ")");
  return s;
}

enum class IndexClass { Diagonal, NextToDiagonal, Other };

inline IndexClass classify(const MultiIndex& i) {
  bool tail_const = true;
  for (std::size_t k = 2; k < i.size(); ++k)
    if (i[k] != i[1]) tail_const = false;
  if (i.size() <= 1) return IndexClass::Diagonal;
  if (tail_const && i[0] == i[1]) return IndexClass::Diagonal;
  if (tail_const) return IndexClass::NextToDiagonal;
  return IndexClass::Other;
}

// head . tail^(length-1)
struct JBlock {
  int head;
  int tail;
  int length;
  friend bool operator==(const JBlock& a, const JBlock& b) {
    return a.head == b.head && a.tail == b.tail && a.length == b.length;
  }
};

struct Factorization {
  int prefix_symbol{0};
  int prefix_length{0};
  std::vector<JBlock> blocks;

  MultiIndex concat() const {
    MultiIndex out(std::size_t(prefix_length), prefix_symbol);
    for (auto& b : blocks) {
      out.push_back(b.head);
      for (int k = 1; k < b.length; ++k) out.push_back(b.tail);
    }
    return out;
  }
};

// Peel maximal constant runs from the right; each run is closed by the single
// differing symbol before it. What cannot be peeled is the diagonal prefix.
inline Factorization j_factorize(const MultiIndex& i) {
  Factorization f;
  std::vector<JBlock> rev;
  std::ptrdiff_t end = (std::ptrdiff_t)i.size();
  while (end > 0) {
    int t = i[end - 1];
    std::ptrdiff_t start = end - 1;
    while (start > 0 && i[start - 1] == t) --start;
    if (start == 0) {
      f.prefix_symbol = t;
      f.prefix_length = (int)end;
      break;
    }
    rev.push_back({i[start - 1], t, int(end - start + 1)});
    end = start - 1;
  }
  f.blocks.assign(rev.rbegin(), rev.rend());
  return f;
}

// All k-indices over {1..m} in lexicographic order.
class Level {
 public:
  Level(int m, int k) : m_(m), k_(k) {
    if (m < 1 || k < 0) throw std::invalid_argument("level needs m >= 1, k >= 0");
  }

  class iterator {
   public:
    iterator(int m, MultiIndex cur, bool done) : m_(m), cur_(std::move(cur)), done_(done) {}
    const MultiIndex& operator*() const { return cur_; }
    iterator& operator++() {
      std::ptrdiff_t p = (std::ptrdiff_t)cur_.size() - 1;
      while (p >= 0 && cur_[p] == m_) cur_[p--] = 1;
      if (p < 0)
        done_ = true;
      else
        ++cur_[p];
      return *this;
    }
    bool operator!=(const iterator& o) const { return done_ != o.done_ || (!done_ && cur_ != o.cur_); }

   private:
    int m_;
    MultiIndex cur_;
    bool done_;
  };

  iterator begin() const { return iterator(m_, MultiIndex(std::size_t(k_), 1), false); }
  iterator end() const { return iterator(m_, {}, true); }
  std::uint64_t size() const {
    std::uint64_t s = 1;
    for (int i = 0; i < k_; ++i) s *= (std::uint64_t)m_;
    return s;
  }

 private:
  int m_, k_;
};

inline Level level(int m, int k) { return Level(m, k); }

}  // namespace gasket
