#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hiperm {

/// 1-based index into a bit string or a permutation. Position 0 is never valid.
using Position = std::uint32_t;

/// Packed string over {0,1} of fixed length n. All positions are 1-based.
class BitString {
public:
  using Word = std::uint64_t;
  static constexpr std::size_t kWordBits = 64;

  BitString() = default;
  explicit BitString(std::size_t n) : n_(n), words_((n + kWordBits - 1) / kWordBits, 0) {}

  static BitString zeros(std::size_t n) { return BitString(n); }
  static BitString ones(std::size_t n);
  /// Parses a string of '0'/'1' characters; throws ParseError on other characters.
  static BitString from_string(std::string_view text);

  std::size_t size() const noexcept { return n_; }

  bool get(Position i) const noexcept {
    const std::size_t k = i - 1;
    return (words_[k / kWordBits] >> (k % kWordBits)) & 1u;
  }
  void set(Position i, bool value) noexcept {
    const std::size_t k = i - 1;
    const Word mask = Word{1} << (k % kWordBits);
    if (value)
      words_[k / kWordBits] |= mask;
    else
      words_[k / kWordBits] &= ~mask;
  }
  void flip(Position i) noexcept {
    const std::size_t k = i - 1;
    words_[k / kWordBits] ^= Word{1} << (k % kWordBits);
  }
  void flip(std::span<const Position> positions) noexcept {
    for (Position p : positions) flip(p);
  }

  /// this ^= other. Lengths must agree (checked).
  BitString& operator^=(const BitString& other);
  friend BitString operator^(BitString a, const BitString& b) { return a ^= b; }

  /// Flips every position i with mask.get(i) == false.
  void flip_outside(const BitString& mask);

  std::size_t count() const noexcept;
  std::string to_string() const;

  std::span<const Word> words() const noexcept { return words_; }

  /// Calls fn(Position) for each set bit in ascending order.
  template <class Fn>
  void for_each_set(Fn&& fn) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      Word bits = words_[w];
      while (bits) {
        const int b = std::countr_zero(bits);
        fn(static_cast<Position>(w * kWordBits + b + 1));
        bits &= bits - 1;
      }
    }
  }

  friend bool operator==(const BitString&, const BitString&) = default;

private:
  void clear_tail() noexcept;

  std::size_t n_ = 0;
  std::vector<Word> words_;
};

}  // namespace hiperm
