#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace mars {

/// Fixed-size set of row indices stored as a bitmap. The fused operations
/// (`count_and`, `assign_or`, ...) avoid temporaries in the scoring loop.
class RowSet {
 public:
  using Word = std::uint64_t;
  static constexpr std::size_t kBits = 64;

  RowSet() = default;
  explicit RowSet(std::size_t n_rows, bool filled = false)
      : n_rows_(n_rows), words_((n_rows + kBits - 1) / kBits, filled ? ~Word{0} : Word{0}) {
    if (filled) trim();
  }

  std::size_t size() const noexcept { return n_rows_; }
  std::size_t word_count() const noexcept { return words_.size(); }
  const Word* data() const noexcept { return words_.data(); }

  bool test(std::size_t row) const noexcept { return (words_[row / kBits] >> (row % kBits)) & 1U; }
  void set(std::size_t row) noexcept { words_[row / kBits] |= Word{1} << (row % kBits); }
  void reset(std::size_t row) noexcept { words_[row / kBits] &= ~(Word{1} << (row % kBits)); }
  void clear() noexcept { std::fill(words_.begin(), words_.end(), Word{0}); }
  void fill() noexcept {
    std::fill(words_.begin(), words_.end(), ~Word{0});
    trim();
  }

  std::size_t count() const noexcept {
    std::size_t c = 0;
    for (Word w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }
  bool any() const noexcept {
    for (Word w : words_)
      if (w) return true;
    return false;
  }
  bool none() const noexcept { return !any(); }

  /// |this ∩ other|
  std::size_t count_and(const RowSet& other) const noexcept {
    std::size_t c = 0;
    for (std::size_t i = 0; i < words_.size(); ++i)
      c += static_cast<std::size_t>(std::popcount(words_[i] & other.words_[i]));
    return c;
  }
  bool intersects(const RowSet& other) const noexcept {
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (words_[i] & other.words_[i]) return true;
    return false;
  }
  /// this ⊆ other
  bool is_subset_of(const RowSet& other) const noexcept {
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (words_[i] & ~other.words_[i]) return false;
    return true;
  }

  RowSet& operator|=(const RowSet& o) noexcept {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
    return *this;
  }
  RowSet& operator&=(const RowSet& o) noexcept {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
    return *this;
  }
  RowSet& operator^=(const RowSet& o) noexcept {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] ^= o.words_[i];
    return *this;
  }
  /// this \= other
  RowSet& subtract(const RowSet& o) noexcept {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= ~o.words_[i];
    return *this;
  }
  /// this = a \ b, reusing storage.
  void assign_difference(const RowSet& a, const RowSet& b) {
    n_rows_ = a.n_rows_;
    words_.resize(a.words_.size());
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] = a.words_[i] & ~b.words_[i];
  }

  friend RowSet operator|(RowSet a, const RowSet& b) { return a |= b; }
  friend RowSet operator&(RowSet a, const RowSet& b) { return a &= b; }
  friend bool operator==(const RowSet&, const RowSet&) = default;

  template <typename Fn>
  void for_each(Fn&& fn) const {
    for (std::size_t i = 0; i < words_.size(); ++i) {
      Word w = words_[i];
      while (w) {
        const int bit = std::countr_zero(w);
        fn(i * kBits + static_cast<std::size_t>(bit));
        w &= w - 1;
      }
    }
  }

  /// Index of the k-th set row (0-based); size() when k >= count().
  std::size_t nth(std::size_t k) const noexcept {
    for (std::size_t i = 0; i < words_.size(); ++i) {
      Word w = words_[i];
      const auto c = static_cast<std::size_t>(std::popcount(w));
      if (k >= c) {
        k -= c;
        continue;
      }
      for (; k > 0; --k) w &= w - 1;
      return i * kBits + static_cast<std::size_t>(std::countr_zero(w));
    }
    return n_rows_;
  }

  std::vector<std::size_t> to_indices() const {
    std::vector<std::size_t> out;
    out.reserve(count());
    for_each([&](std::size_t r) { out.push_back(r); });
    return out;
  }

 private:
  void trim() noexcept {
    if (const std::size_t tail = n_rows_ % kBits; tail != 0 && !words_.empty())
      words_.back() &= (Word{1} << tail) - 1;
  }

  std::size_t n_rows_ = 0;
  std::vector<Word> words_;
};

}  // namespace mars
