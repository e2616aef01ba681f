#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "hiperm/bitstring.hpp"
#include "hiperm/oracle.hpp"
#include "hiperm/transcript.hpp"

namespace hiperm {

/// Exact count of secrets; bounded by 2^n * n!.
using BigCount = boost::multiprecision::cpp_int;

/// Everything a guessing history reveals: candidate sets V_1..V_n (V_j holds
/// the positions still possible for pi(j)) plus a best-scoring query.
///
/// Sets are kept as sorted position arrays. Sets never touched by an update
/// stay in a "full" representation standing for [n]; equality and all
/// accessors treat a full set and an explicit [n] the same.
///
/// The update rules only ever produce laminar families: for i < j the sets
/// V_i and V_j are disjoint or V_i is contained in V_j. Counting and
/// feasibility rely on this.
class KnowledgeState {
public:
  KnowledgeState() = default;
  explicit KnowledgeState(std::size_t n);

  /// Builds the sets from the exclusion rules applied to all pairs of entries.
  /// Independent of update(); the two must agree set-for-set.
  static KnowledgeState from_history(const Transcript& h);

  /// Incremental update against the current best query. The first query only
  /// becomes the best query.
  void update(const BitString& query, int score);

  std::size_t n() const noexcept { return n_; }
  const std::optional<BitString>& best_query() const noexcept { return best_query_; }
  std::optional<int> best_score() const noexcept {
    return best_query_ ? std::optional<int>(best_score_) : std::nullopt;
  }

  bool is_full(Position j) const noexcept { return full_[j - 1]; }
  std::size_t set_size(Position j) const noexcept { return full_[j - 1] ? n_ : sets_[j - 1].size(); }
  bool contains(Position j, Position p) const;
  /// Materialized, ascending.
  std::vector<Position> candidates(Position j) const;

  /// Checks the laminar property pairwise; O(n^2 * n). Intended for tests.
  bool is_laminar() const;

  friend bool operator==(const KnowledgeState& a, const KnowledgeState& b);

private:
  void intersect(Position j, const BitString& agree);
  void subtract(Position j, const BitString& agree);

  std::size_t n_ = 0;
  std::vector<std::vector<Position>> sets_;
  std::vector<bool> full_;
  std::optional<BitString> best_query_;
  int best_score_ = 0;
};

/// Value-returning form of KnowledgeState::update.
KnowledgeState update_incremental(KnowledgeState state, const BitString& query, int score);

/// Greedy choice counts |V_i| - |{j < i : V_j subset of V_i}| for i = 1..n.
std::vector<long long> greedy_factors(const KnowledgeState& state);

bool is_feasible(const KnowledgeState& state);

/// Number of consistent (z, pi); 0 iff infeasible.
BigCount count_consistent(const KnowledgeState& state);

/// A consistent secret: pi greedily takes the smallest free candidate, z
/// copies the best query on pi(1..s*), disagrees at pi(s*+1), and is 0
/// elsewhere. Throws PreconditionError on an infeasible state.
Secret witness(const KnowledgeState& state);

/// Positions l in V_i such that some consistent secret has pi(i) = l.
/// Throws DimensionError for i outside [1..n], PreconditionError if infeasible.
std::vector<Position> feasible_values(const KnowledgeState& state, Position i);

struct VerifyReport {
  std::size_t entries = 0;
  /// Number of non-empty prefixes that are feasible. Feasibility is
  /// monotone, so these are exactly the prefixes of length 1..feasible_prefixes.
  std::size_t feasible_prefixes = 0;
  /// 1-based index of the first entry that makes the history infeasible.
  std::optional<std::size_t> first_infeasible;
  BigCount final_count;
  bool unique = false;
  /// Present only when a secret was supplied.
  std::optional<bool> replay_ok;
  std::optional<std::size_t> first_replay_mismatch;

  bool feasible() const noexcept { return !first_infeasible; }
  /// {"feasible_prefixes", "final_count", "unique", "replay_ok", ...}
  std::string to_json() const;
};

VerifyReport verify_transcript(const Transcript& h, const Secret* secret = nullptr);

}  // namespace hiperm
