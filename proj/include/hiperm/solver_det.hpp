#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "hiperm/bitstring.hpp"
#include "hiperm/oracle.hpp"
#include "hiperm/transcript.hpp"

namespace hiperm {

struct SolveResult {
  Secret secret;
  std::size_t queries = 0;
  /// Copy of the handle's transcript sink; empty when the run was not recorded.
  Transcript transcript;
};

/// A string together with its (known) score.
struct ScoredString {
  BitString bits;
  int score = 0;
};

/// Remembers the last few answered queries so a solver never pays twice
/// for a string it has already asked about.
class RecentScores {
public:
  void remember(const BitString& x, int score);
  std::optional<int> lookup(const BitString& x) const;

private:
  std::array<std::optional<ScoredString>, 4> slots_;
  std::size_t next_ = 0;
};

/// Query x unless its score is cached.
int query_cached(OracleHandle& oracle, const BitString& x, RecentScores& recent);

/// Halving search for pi(i) inside V (ascending). Precondition: pi(i) in V,
/// pi(1..i-1) not in V, x.score >= i-1. If x.score > i-1 every bit of V is
/// flipped first so that afterwards x.score == i-1 (x is updated in place).
/// Each round flips the first ceil(|V|/2) elements of V.
///
/// truth, when given, enables invariant checks against the real secret.
Position bin_search(OracleHandle& oracle, ScoredString& x, Position i, std::vector<Position> V,
                    RecentScores* recent = nullptr, const Secret* truth = nullptr);

/// Identifies pi(first..n) and the matching bits one index at a time with
/// bin_search. On entry x agrees with the secret on pi(1..first-1), its score
/// is cached in x_score if known, and pool holds the unidentified positions.
/// images[j-1] receives pi(j). On return x equals z.
void identify_sequentially(OracleHandle& oracle, BitString& x, std::optional<int> x_score,
                           Position first, std::vector<Position> pool,
                           std::vector<Position>& images, RecentScores& recent,
                           const Secret* truth = nullptr);

/// The deterministic O(n log n) strategy starting from 0^n. Uses at most
/// 2 + n + sum_{i=1..n} ceil(log2(n-i+1)) queries.
SolveResult solve_det(OracleHandle& oracle, std::size_t n, const Secret* truth = nullptr);

/// n * (ceil(log2 n) + 2) + 2.
std::size_t det_query_bound(std::size_t n);

std::size_t ceil_log2(std::size_t v);

}  // namespace hiperm
