#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "hiperm/bitstring.hpp"
#include "hiperm/oracle.hpp"
#include "hiperm/rng.hpp"
#include "hiperm/solver_det.hpp"

namespace hiperm {

/// Parameters of the level system. Levels are 1-based: level l can hold up
/// to alpha(l) candidate sets of size at most target(l).
struct LevelConfig {
  std::size_t n = 0;
  int d = 4;
  int c = 1;
  std::size_t t = 1;
  std::size_t q = 0;
  std::vector<std::size_t> alphas;  // alphas[l-1] = alpha_l
  std::vector<std::size_t> targets; // targets[l-1] = max(1, ceil(n / alpha_l^d))

  /// alpha_1 = max(2, ceil(log2 n)), alpha_l = alpha_{l-1}^2, t maximal with
  /// alpha_t^d <= n (at least 1), q = n - ceil(n / alpha_1) unless q_frac
  /// gives q = floor(q_frac * n). Throws DimensionError on bad arguments.
  static LevelConfig make(std::size_t n, int d = 4, std::optional<double> q_frac = std::nullopt,
                          int c = 1);

  std::size_t alpha(std::size_t level) const { return alphas.at(level - 1); }
  std::size_t target(std::size_t level) const { return targets.at(level - 1); }
  double q_frac() const { return n ? static_cast<double>(q) / static_cast<double>(n) : 0.0; }
};

/// Counters collected during one randomized solve.
struct RandStats {
  std::vector<std::size_t> advance_calls;  // per level, index l-1
  std::vector<std::size_t> failures;       // per level, index l-1
  std::size_t max_level1_call_queries = 0;
  std::size_t reduction_steps = 0;
  std::size_t phase1_queries = 0;
  std::size_t part2_queries = 0;
  std::size_t checkpoints = 0;             // instrumented checks that ran
};

struct AdvanceResult {
  std::vector<Position> J;
  bool failed = false;
};

/// The O(n log log n) strategy. One instance performs one solve; the
/// building blocks are public so they can be exercised in isolation.
///
/// State: V_j for j <= s are pairwise disjoint, V_j = [n] for j > s (kept
/// implicit), and the cached strings x, y satisfy f(x) = s < f(y) between
/// iterations of advance. With a known secret passed as truth, every
/// checkpoint verifies these invariants and pi(j) in V_j.
class RandomizedSolver {
public:
  RandomizedSolver(OracleHandle& oracle, LevelConfig cfg, RandomSource rng,
                   const Secret* truth = nullptr);

  SolveResult run();

  /// With a truth secret, off keeps only the constant-time checks (failure
  /// test exactness, returned set sizes) and skips the O(n) state audits.
  void set_full_checks(bool on) noexcept { full_checks_ = on; }

  /// Collects up to capacity indices whose sets have size <= target(level).
  AdvanceResult advance(std::size_t level, std::size_t capacity);

  /// Randomized halving of V (which must contain pi(i) and avoid pi(1..i-1))
  /// until |V| <= target. x.score must equal i-1.
  std::vector<Position> rand_bin_search(const ScoredString& x, Position i, std::vector<Position> V,
                                        std::size_t target);

  /// Shrinks V_j, j in J, to size <= m through successive reduction steps
  /// with parameter k. Requires f(x) >= max J.
  void size_reduction(std::size_t k, const std::vector<Position>& J, std::size_t m);

  /// One ReductionStep: requires |V_j| <= k*m for all j in J.
  void reduction_step(std::size_t k, const std::vector<Position>& J, std::size_t m);

  /// Identifies pi(s+1..n) by deterministic binary search.
  void finish_part2();

  /// Replaces the state: V_1..V_s from sets (pairwise disjoint) and x with its
  /// score. y is left unset. For tests and benchmarks of the subroutines.
  void load_state(std::vector<std::vector<Position>> sets, ScoredString x);

  std::size_t s() const noexcept { return s_; }
  const std::vector<Position>& candidates(Position j) const { return sets_.at(j - 1); }
  const ScoredString& x() const noexcept { return x_; }
  const RandStats& stats() const noexcept { return stats_; }
  const LevelConfig& config() const noexcept { return cfg_; }
  const OracleHandle& oracle() const noexcept { return oracle_; }

private:
  bool auditing() const noexcept { return truth_ && full_checks_; }
  int query(const BitString& b);
  void claim(Position p, Position j);
  void release(Position p);
  void drop_front(Position j, std::size_t count);
  void keep_front(Position j, std::size_t count);
  /// Queries y = x with all unowned positions flipped; true if the two-sided
  /// test detects pi(s+1) inside an owned set.
  bool failure_test();
  void checkpoint(const char* where);
  void check_failure_exact(bool failed);

  OracleHandle& oracle_;
  LevelConfig cfg_;
  RandomSource rng_;
  const Secret* truth_;
  bool full_checks_ = true;
  RandStats stats_;

  std::size_t n_;
  std::size_t s_ = 0;
  ScoredString x_, y_;
  std::vector<std::vector<Position>> sets_;  // sets_[j-1] = V_j, meaningful for j <= s
  std::vector<Position> owner_;              // owner_[p] = j if p in V_j, else 0
  BitString owned_;                          // owner_[p] != 0
  std::vector<Position> free_;               // positions with owner 0
  std::vector<std::size_t> free_index_;      // index into free_, by position
};

SolveResult solve_rand(OracleHandle& oracle, std::size_t n, const LevelConfig& cfg,
                       RandomSource rng, const Secret* truth = nullptr,
                       RandStats* stats_out = nullptr);

}  // namespace hiperm
