#pragma once

#include <cstdint>
#include <vector>
#include <functional>
#include <bit>

namespace ofsc {

// Fixed-width dynamic bitset used for knowledge sets. Width is set at
// construction and all binary operations assume equal widths.
class Bitset {
 public:
  Bitset() = default;
  explicit Bitset(int nbits) : nbits_(nbits), w_((nbits + 63) / 64, 0) {}

  int size() const { return nbits_; }

  void set(int i) { w_[i >> 6] |= (uint64_t{1} << (i & 63)); }
  void reset(int i) { w_[i >> 6] &= ~(uint64_t{1} << (i & 63)); }
  bool test(int i) const { return (w_[i >> 6] >> (i & 63)) & 1; }

  bool empty() const {
    for (uint64_t x : w_) if (x) return false;
    return true;
  }

  int count() const {
    int c = 0;
    for (uint64_t x : w_) c += std::popcount(x);
    return c;
  }

  // Index of the lowest set bit, or -1.
  int first() const {
    for (size_t i = 0; i < w_.size(); ++i)
      if (w_[i]) return int(i * 64 + std::countr_zero(w_[i]));
    return -1;
  }

  int next(int i) const {  // lowest set bit > i, or -1
    ++i;
    if (i >= nbits_) return -1;
    size_t k = size_t(i) >> 6;
    uint64_t cur = w_[k] & (~uint64_t{0} << (i & 63));
    while (true) {
      if (cur) return int(k * 64 + std::countr_zero(cur));
      if (++k == w_.size()) return -1;
      cur = w_[k];
    }
  }

  Bitset& operator|=(const Bitset& o) {
    for (size_t i = 0; i < w_.size(); ++i) w_[i] |= o.w_[i];
    return *this;
  }
  Bitset& operator&=(const Bitset& o) {
    for (size_t i = 0; i < w_.size(); ++i) w_[i] &= o.w_[i];
    return *this;
  }
  bool is_subset_of(const Bitset& o) const {
    for (size_t i = 0; i < w_.size(); ++i)
      if (w_[i] & ~o.w_[i]) return false;
    return true;
  }
  bool operator==(const Bitset& o) const { return nbits_ == o.nbits_ && w_ == o.w_; }

  const std::vector<uint64_t>& words() const { return w_; }

  struct Hash {
    size_t operator()(const Bitset& b) const {
      size_t h = 0xcbf29ce484222325ull;
      for (uint64_t x : b.w_) {
        h ^= x;
        h *= 0x100000001b3ull;
      }
      return h;
    }
  };

  template <class F>
  void for_each(F&& f) const {
    for (int i = first(); i >= 0; i = next(i)) f(i);
  }

 private:
  int nbits_ = 0;
  std::vector<uint64_t> w_;
};

}  // namespace ofsc
