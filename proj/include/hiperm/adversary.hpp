#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "hiperm/bitstring.hpp"
#include "hiperm/knowledge.hpp"
#include "hiperm/oracle.hpp"
#include "hiperm/solver_det.hpp"

namespace hiperm {

struct AdversaryOptions {
  /// Keep a KnowledgeState of the full history and check feasibility after
  /// every answer (InvariantViolation otherwise). Costly; meant for tests.
  bool track_knowledge = false;
};

/// Adaptive oracle that answers so that any deterministic solver needs many
/// queries before the score reaches n/2.
///
/// Positions are resolved two at a time. Within a block the first query that
/// agrees with the resolved prefix becomes the block's best query and scores
/// prefix+1; later such queries score prefix or prefix+1, whichever keeps
/// the block's V_1 larger (ties go to prefix). When |V_1| reaches 2 the
/// block commits pi(prefix+1) = min V_1 with the best query's bit and
/// pi(prefix+2) = min(V_2 minus that) with the opposite bit. Once the prefix
/// reaches n/2 the remaining positions are fixed and the adversary answers
/// honestly.
class Adversary {
public:
  struct Block {
    std::size_t universe = 0;  // unresolved positions when the block opened
    std::size_t answers = 0;   // answers given while the block was open, first included
  };

  explicit Adversary(std::size_t n, AdversaryOptions opts = {});

  int answer(const BitString& x);
  OracleHandle handle(Transcript* sink = nullptr, std::size_t cap = 0);

  std::size_t n() const noexcept { return n_; }
  std::size_t resolved_prefix() const noexcept { return prefix_images_.size(); }
  bool passing_through() const noexcept { return static_cast<bool>(final_); }
  int max_score() const noexcept { return max_score_; }
  std::size_t block_v1_size() const noexcept { return block_v1_.size(); }
  std::size_t block_v2_size() const noexcept { return block_v2_.size(); }
  /// Closed blocks, in order.
  const std::vector<Block>& blocks() const noexcept { return blocks_; }
  const KnowledgeState* knowledge() const noexcept { return knowledge_ ? &*knowledge_ : nullptr; }

  /// The secret the adversary is bound to: the resolved prefix, the open
  /// block resolved as if |V_1| had reached 2, and the free positions in
  /// ascending order with bit 0. Consistent with every answer given.
  Secret committed_secret() const;

private:
  int prefix_score(const BitString& x) const;
  void open_block(const BitString& x);
  void resolve_block();
  void maybe_commit_all();
  static void resolve_into(std::vector<Position>& images, BitString& z, const BitString& best,
                           const std::vector<Position>& v1, const std::vector<Position>& v2);

  std::size_t n_;
  std::vector<Position> prefix_images_;  // pi(1..p)
  BitString z_;                          // z on resolved positions (others 0)
  std::vector<char> resolved_;           // by position
  std::optional<BitString> block_best_;
  std::vector<Position> block_v1_, block_v2_;  // ascending
  std::size_t block_answers_ = 0;
  std::size_t block_universe_ = 0;
  std::vector<Block> blocks_;
  int max_score_ = 0;
  std::unique_ptr<SecretOracle> final_;
  std::optional<KnowledgeState> knowledge_;
};

using DetSolverFn = std::function<SolveResult(OracleHandle&, std::size_t)>;

struct ForcingResult {
  /// Queries asked up to and including the first answer with score >= n/2
  /// (all queries if the solver stopped earlier).
  std::size_t forced = 0;
  std::size_t total = 0;
  Secret committed;
  Secret recovered;
  Transcript transcript;
};

/// Plays solver against an Adversary. The oracle refuses query number
/// 10 * n * ceil(log2 n)^2 + 1 with RunawayError.
ForcingResult play_adversary(const DetSolverFn& solver, std::size_t n, AdversaryOptions opts = {});

std::size_t forced_queries(const DetSolverFn& solver, std::size_t n);

}  // namespace hiperm
