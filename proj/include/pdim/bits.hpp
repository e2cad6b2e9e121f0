#pragma once

// Word-level helpers for the fixed-width bit rows used by Graph and the
// per-vertex color sets of the greedy coloring.

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace pdim::bits {

using Word = std::uint64_t;
inline constexpr std::size_t kWordBits = 64;

constexpr std::size_t words_for(std::size_t nbits) {
  return (nbits + kWordBits - 1) / kWordBits;
}

constexpr std::size_t word_of(std::size_t i) { return i / kWordBits; }
constexpr Word mask_of(std::size_t i) { return Word{1} << (i % kWordBits); }

inline bool test(std::span<const Word> row, std::size_t i) {
  return (row[word_of(i)] & mask_of(i)) != 0;
}
inline void set(std::span<Word> row, std::size_t i) { row[word_of(i)] |= mask_of(i); }
inline void reset(std::span<Word> row, std::size_t i) { row[word_of(i)] &= ~mask_of(i); }

inline std::size_t popcount(std::span<const Word> row) {
  std::size_t c = 0;
  for (Word w : row) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

// Mask for the valid bits of the last word of an nbits-wide row.
constexpr Word tail_mask(std::size_t nbits) {
  const std::size_t r = nbits % kWordBits;
  return r == 0 ? ~Word{0} : (Word{1} << r) - 1;
}

// Calls f(i) for every set bit i in ascending order.
template <class F>
void for_each(std::span<const Word> row, F&& f) {
  for (std::size_t w = 0; w < row.size(); ++w) {
    Word x = row[w];
    while (x != 0) {
      const auto b = static_cast<std::size_t>(std::countr_zero(x));
      f(w * kWordBits + b);
      x &= x - 1;
    }
  }
}

// Index of the rank-th (0-based) set bit. Caller guarantees rank < popcount.
inline std::size_t select(std::span<const Word> row, std::size_t rank) {
  for (std::size_t w = 0;; ++w) {
    Word x = row[w];
    const auto c = static_cast<std::size_t>(std::popcount(x));
    if (rank < c) {
      for (std::size_t k = 0; k < rank; ++k) x &= x - 1;
      return w * kWordBits + static_cast<std::size_t>(std::countr_zero(x));
    }
    rank -= c;
  }
}

// Simple owning bit vector with a fixed logical width.
class Bitset {
 public:
  Bitset() = default;
  explicit Bitset(std::size_t nbits) : nbits_(nbits), words_(words_for(nbits), 0) {}

  std::size_t size() const { return nbits_; }
  std::span<const Word> words() const { return words_; }
  std::span<Word> words() { return words_; }

  bool test(std::size_t i) const { return bits::test(words_, i); }
  void set(std::size_t i) { bits::set(words_, i); }
  void reset(std::size_t i) { bits::reset(words_, i); }
  std::size_t count() const { return bits::popcount(words_); }
  void clear() { std::fill(words_.begin(), words_.end(), Word{0}); }

  friend bool operator==(const Bitset&, const Bitset&) = default;

 private:
  std::size_t nbits_ = 0;
  std::vector<Word> words_;
};

}  // namespace pdim::bits
