#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace wk4 {

// Fixed-size bit vector. Used for world sets, valuations and type vectors.
class BitVec {
public:
  BitVec() = default;
  explicit BitVec(int nbits, bool value = false)
      : nbits_(nbits), words_((nbits + 63) / 64, value ? ~0ULL : 0ULL) {
    trim();
  }

  int size() const { return nbits_; }

  bool get(int i) const { return (words_[i >> 6] >> (i & 63)) & 1ULL; }
  void set(int i, bool v = true) {
    if (v)
      words_[i >> 6] |= 1ULL << (i & 63);
    else
      words_[i >> 6] &= ~(1ULL << (i & 63));
  }

  bool any() const {
    for (uint64_t w : words_)
      if (w) return true;
    return false;
  }
  bool none() const { return !any(); }
  int count() const {
    int c = 0;
    for (uint64_t w : words_) c += __builtin_popcountll(w);
    return c;
  }

  bool intersects(const BitVec& o) const {
    for (size_t i = 0; i < words_.size(); ++i)
      if (words_[i] & o.words_[i]) return true;
    return false;
  }
  bool subset_of(const BitVec& o) const {
    for (size_t i = 0; i < words_.size(); ++i)
      if (words_[i] & ~o.words_[i]) return false;
    return true;
  }

  BitVec& operator&=(const BitVec& o) {
    for (size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
    return *this;
  }
  BitVec& operator|=(const BitVec& o) {
    for (size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
    return *this;
  }
  BitVec operator&(const BitVec& o) const {
    BitVec r = *this;
    r &= o;
    return r;
  }
  BitVec operator|(const BitVec& o) const {
    BitVec r = *this;
    r |= o;
    return r;
  }
  BitVec complement() const {
    BitVec r = *this;
    for (auto& w : r.words_) w = ~w;
    r.trim();
    return r;
  }

  bool operator==(const BitVec& o) const {
    return nbits_ == o.nbits_ && words_ == o.words_;
  }
  bool operator!=(const BitVec& o) const { return !(*this == o); }
  bool operator<(const BitVec& o) const {
    if (nbits_ != o.nbits_) return nbits_ < o.nbits_;
    return words_ < o.words_;
  }

  size_t hash() const {
    size_t h = std::hash<int>()(nbits_);
    for (uint64_t w : words_) h = h * 1099511628211ULL + (size_t)w;
    return h;
  }

  template <typename F>
  void for_each(F&& f) const {
    for (size_t wi = 0; wi < words_.size(); ++wi) {
      uint64_t w = words_[wi];
      while (w) {
        int b = __builtin_ctzll(w);
        f((int)(wi * 64) + b);
        w &= w - 1;
      }
    }
  }

  std::vector<int> to_indices() const {
    std::vector<int> out;
    for_each([&](int i) { out.push_back(i); });
    return out;
  }

  std::string to_string() const {
    std::string s(nbits_, '0');
    for (int i = 0; i < nbits_; ++i)
      if (get(i)) s[i] = '1';
    return s;
  }

private:
  void trim() {
    if (nbits_ & 63) {
      if (!words_.empty()) words_.back() &= (1ULL << (nbits_ & 63)) - 1;
    }
  }

  int nbits_ = 0;
  std::vector<uint64_t> words_;
};

// Square or rectangular bit matrix with O(1) lookups.
class BitMatrix {
public:
  BitMatrix() = default;
  BitMatrix(int rows, int cols)
      : rows_(rows), cols_(cols), row_words_((cols + 63) / 64),
        bits_((size_t)rows * row_words_, 0) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  bool get(int r, int c) const {
    return (bits_[(size_t)r * row_words_ + (c >> 6)] >> (c & 63)) & 1ULL;
  }
  void set(int r, int c, bool v = true) {
    uint64_t& w = bits_[(size_t)r * row_words_ + (c >> 6)];
    if (v)
      w |= 1ULL << (c & 63);
    else
      w &= ~(1ULL << (c & 63));
  }

  // True iff row r intersects the given column set.
  bool row_intersects(int r, const BitVec& cols) const {
    for (int wi = 0; wi < row_words_; ++wi) {
      uint64_t w = bits_[(size_t)r * row_words_ + wi];
      if (!w) continue;
      for (int b = 0; b < 64; ++b) {
        if ((w >> b) & 1ULL) {
          int c = wi * 64 + b;
          if (c < cols_ && cols.get(c)) return true;
        }
      }
    }
    return false;
  }

  template <typename F>
  void for_each_in_row(int r, F&& f) const {
    for (int wi = 0; wi < row_words_; ++wi) {
      uint64_t w = bits_[(size_t)r * row_words_ + wi];
      while (w) {
        int b = __builtin_ctzll(w);
        f(wi * 64 + b);
        w &= w - 1;
      }
    }
  }

  bool operator==(const BitMatrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && bits_ == o.bits_;
  }

private:
  int rows_ = 0, cols_ = 0, row_words_ = 0;
  std::vector<uint64_t> bits_;
};

class InvariantError : public std::logic_error {
public:
  explicit InvariantError(const std::string& what) : std::logic_error(what) {}
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw InvariantError(what);
}

// 2^e with saturation, for the astronomically large theoretical bounds.
inline uint64_t pow2_saturated(uint64_t e) {
  if (e >= 63) return UINT64_MAX;
  return 1ULL << e;
}

}  // namespace wk4
