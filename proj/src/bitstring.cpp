#include "hiperm/bitstring.hpp"

#include "hiperm/errors.hpp"

namespace hiperm {

BitString BitString::ones(std::size_t n) {
  BitString b(n);
  for (auto& w : b.words_) w = ~Word{0};
  b.clear_tail();
  return b;
}

BitString BitString::from_string(std::string_view text) {
  BitString b(text.size());
  for (std::size_t k = 0; k < text.size(); ++k) {
    const char c = text[k];
    if (c != '0' && c != '1')
      throw ParseError("bit string contains '" + std::string(1, c) + "'", 0);
    if (c == '1') b.set(static_cast<Position>(k + 1), true);
  }
  return b;
}

BitString& BitString::operator^=(const BitString& other) {
  if (other.n_ != n_)
    throw DimensionError("bit string length " + std::to_string(other.n_) + " != " +
                         std::to_string(n_));
  for (std::size_t w = 0; w < words_.size(); ++w) words_[w] ^= other.words_[w];
  return *this;
}

void BitString::flip_outside(const BitString& mask) {
  if (mask.n_ != n_) throw DimensionError("mask length mismatch");
  for (std::size_t w = 0; w < words_.size(); ++w) words_[w] ^= ~mask.words_[w];
  clear_tail();
}

std::size_t BitString::count() const noexcept {
  std::size_t c = 0;
  for (Word w : words_) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

std::string BitString::to_string() const {
  std::string s(n_, '0');
  for (std::size_t k = 0; k < n_; ++k)
    if (get(static_cast<Position>(k + 1))) s[k] = '1';
  return s;
}

void BitString::clear_tail() noexcept {
  if (const std::size_t r = n_ % kWordBits; r != 0 && !words_.empty())
    words_.back() &= (Word{1} << r) - 1;
}

}  // namespace hiperm
