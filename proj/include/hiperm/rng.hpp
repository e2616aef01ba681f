#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <utility>

namespace hiperm {

/// Seedable deterministic random stream. Not thread-safe; parallel work takes
/// one split() child per task so results do not depend on scheduling.
class RandomSource {
public:
  explicit RandomSource(std::uint64_t seed) : seed_(seed), engine_(mix(seed)) {}

  std::uint64_t seed() const noexcept { return seed_; }

  /// Child stream derived from (seed, index) only; does not advance this stream.
  RandomSource split(std::uint64_t index) const { return RandomSource(mix(seed_ ^ mix(index + 1))); }

  /// Uniform integer in [0, bound). bound must be > 0.
  /// Lemire's multiply-shift rejection, so the stream is the same on every
  /// standard library. Bounds below 2^32 consume half an engine word.
  std::uint64_t below(std::uint64_t bound) {
    if (bound <= 0xffffffffULL) return below32(static_cast<std::uint32_t>(bound));
    unsigned __int128 m = static_cast<unsigned __int128>(engine_()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<unsigned __int128>(engine_()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }
  bool coin() { return (next32() >> 31) != 0; }

  /// Partial Fisher-Yates: moves a uniform random m-subset of items to the
  /// front, in random order. Consumes exactly min(m, size-1) draws.
  template <class T>
  void sample_front(std::span<T> items, std::size_t m) {
    const std::size_t size = items.size();
    for (std::size_t k = 0; k < m && k + 1 < size; ++k) {
      const std::size_t pick = k + static_cast<std::size_t>(below(size - k));
      std::swap(items[k], items[pick]);
    }
  }

private:
  std::uint32_t next32() {
    if (spare_) {
      const auto v = static_cast<std::uint32_t>(*spare_);
      spare_.reset();
      return v;
    }
    const std::uint64_t w = engine_();
    spare_ = w >> 32;
    return static_cast<std::uint32_t>(w);
  }

  std::uint32_t below32(std::uint32_t bound) {
    std::uint64_t m = static_cast<std::uint64_t>(next32()) * bound;
    auto low = static_cast<std::uint32_t>(m);
    if (low < bound) {
      const std::uint32_t threshold = (0u - bound) % bound;
      while (low < threshold) {
        m = static_cast<std::uint64_t>(next32()) * bound;
        low = static_cast<std::uint32_t>(m);
      }
    }
    return static_cast<std::uint32_t>(m >> 32);
  }

  // splitmix64 finalizer
  static std::uint64_t mix(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::optional<std::uint64_t> spare_;
};

}  // namespace hiperm
