#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "hiperm/bitstring.hpp"
#include "hiperm/rng.hpp"
#include "hiperm/transcript.hpp"

namespace hiperm {

/// A permutation of [n]; image(j) = pi(j), both 1-based.
class Permutation {
public:
  Permutation() = default;
  /// Throws DimensionError unless images is a bijection on [n].
  explicit Permutation(std::vector<Position> images);

  static Permutation identity(std::size_t n);

  std::size_t size() const noexcept { return images_.size(); }
  Position image(Position j) const noexcept { return images_[j - 1]; }
  /// pi^{-1}, computed on demand.
  std::vector<Position> inverse() const;
  const std::vector<Position>& images() const noexcept { return images_; }

  friend bool operator==(const Permutation&, const Permutation&) = default;

private:
  std::vector<Position> images_;
};

/// The hidden pair (z, pi).
struct Secret {
  BitString z;
  Permutation pi;

  Secret() = default;
  /// Throws DimensionError if the sizes differ or are zero.
  Secret(BitString z_, Permutation pi_);

  std::size_t size() const noexcept { return z.size(); }
  friend bool operator==(const Secret&, const Secret&) = default;
};

/// Length of the longest prefix, in pi-order, on which x agrees with z.
int score(const Secret& secret, const BitString& x);

/// score(z xor e_i) + 1, which equals pi^{-1}(i).
Position invert_position(const Secret& secret, Position i);

Secret gen_uniform(std::size_t n, RandomSource& rng);
/// pi uniform; z fixed by z_{pi(i)} = i mod 2.
Secret gen_hard(std::size_t n, RandomSource& rng);

enum class SecretDist { uniform, hard };
Secret generate(SecretDist dist, std::size_t n, RandomSource& rng);

// Two-line text format: z as '0'/'1' characters, then pi(1)..pi(n) separated by spaces.
void write_secret(std::ostream& out, const Secret& s);
Secret read_secret(std::istream& in);
Secret load_secret(const std::string& path);

/// Counting, optionally recording gateway to a score function. Solvers only
/// ever see this type, so honest and adversarial oracles are interchangeable.
class OracleHandle {
public:
  using QueryFn = std::function<int(const BitString&)>;

  /// cap = 0 means unlimited; otherwise query number cap+1 throws RunawayError.
  OracleHandle(std::size_t n, QueryFn fn, Transcript* sink = nullptr, std::size_t cap = 0);

  int query(const BitString& x);

  std::size_t n() const noexcept { return n_; }
  std::size_t queries() const noexcept { return queries_; }
  Transcript* sink() const noexcept { return sink_; }

private:
  std::size_t n_;
  QueryFn fn_;
  Transcript* sink_;
  std::size_t cap_;
  std::size_t queries_ = 0;
};

/// Honest oracle for a fixed secret. Scores incrementally against the last
/// query, so a query costs O(n/64 + |x xor previous| + score/64) instead of
/// a walk along pi.
class SecretOracle {
public:
  explicit SecretOracle(Secret secret);

  int evaluate(const BitString& x);
  const Secret& secret() const noexcept { return secret_; }

  OracleHandle handle(Transcript* sink = nullptr, std::size_t cap = 0);

private:
  Secret secret_;
  std::vector<Position> rank_;               // rank_[p-1] = pi^{-1}(p)
  BitString reference_;                      // last evaluated string
  std::vector<BitString::Word> mismatch_;    // bit r-1 set iff reference_ and z differ at pi(r)
};

}  // namespace hiperm
