#include "hiperm/solver_det.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <string>

#include "hiperm/errors.hpp"

namespace hiperm {

std::size_t ceil_log2(std::size_t v) {
  return v <= 1 ? 0 : static_cast<std::size_t>(std::bit_width(v - 1));
}

std::size_t det_query_bound(std::size_t n) { return n * (ceil_log2(n) + 2) + 2; }

void RecentScores::remember(const BitString& x, int score) {
  slots_[next_] = ScoredString{x, score};
  next_ = (next_ + 1) % slots_.size();
}

std::optional<int> RecentScores::lookup(const BitString& x) const {
  for (const auto& slot : slots_)
    if (slot && slot->bits == x) return slot->score;
  return std::nullopt;
}

int query_cached(OracleHandle& oracle, const BitString& x, RecentScores& recent) {
  if (auto cached = recent.lookup(x)) return *cached;
  const int s = oracle.query(x);
  recent.remember(x, s);
  return s;
}

Position bin_search(OracleHandle& oracle, ScoredString& x, Position i, std::vector<Position> V,
                    RecentScores* recent, const Secret* truth) {
  const int floor_score = static_cast<int>(i) - 1;
  if (V.empty()) throw InconsistencyError("bin_search: empty candidate set for index " +
                                          std::to_string(i));
  if (x.score < floor_score)
    throw PreconditionError("bin_search: f(x) = " + std::to_string(x.score) + " < i-1");
  if (x.score > floor_score) {
    x.bits.flip(V);
    x.score = floor_score;
  }
  while (V.size() > 1) {
    if (truth) {
      const Position target = truth->pi.image(i);
      if (!std::binary_search(V.begin(), V.end(), target))
        throw InvariantViolation("bin_search: pi(i) left V");
      if (score(*truth, x.bits) != floor_score)
        throw InvariantViolation("bin_search: f(x) != i-1");
    }
    const std::size_t half = (V.size() + 1) / 2;
    BitString y = x.bits;
    y.flip(std::span<const Position>(V.data(), half));
    const int f = oracle.query(y);
    if (recent) recent->remember(y, f);
    if (f < floor_score)
      throw InconsistencyError("bin_search: flipping candidates for index " + std::to_string(i) +
                               " lowered the score to " + std::to_string(f));
    if (f == floor_score)
      V.erase(V.begin(), V.begin() + static_cast<std::ptrdiff_t>(half));
    else
      V.resize(half);
  }
  return V.front();
}

void identify_sequentially(OracleHandle& oracle, BitString& x, std::optional<int> x_score,
                           Position first, std::vector<Position> pool,
                           std::vector<Position>& images, RecentScores& recent,
                           const Secret* truth) {
  const std::size_t n = x.size();
  std::sort(pool.begin(), pool.end());
  if (pool.size() != n - (first - 1))
    throw PreconditionError("identify_sequentially: pool size does not match remaining indices");
  for (std::size_t i = first; i <= n; ++i) {
    const int s = x_score ? *x_score : query_cached(oracle, x, recent);
    ScoredString cur{std::move(x), s};
    const Position p = bin_search(oracle, cur, static_cast<Position>(i), pool, &recent, truth);
    x = std::move(cur.bits);
    images[i - 1] = p;
    pool.erase(std::lower_bound(pool.begin(), pool.end(), p));
    x.flip(p);
    x_score.reset();
    if (truth) {
      if (truth->pi.image(static_cast<Position>(i)) != p)
        throw InvariantViolation("identified wrong pi(" + std::to_string(i) + ")");
      if (x.get(p) != truth->z.get(p))
        throw InvariantViolation("committed bit differs from z at pi(" + std::to_string(i) + ")");
    }
  }
}

SolveResult solve_det(OracleHandle& oracle, std::size_t n, const Secret* truth) {
  if (n == 0 || oracle.n() != n) throw DimensionError("solve_det: size mismatch");
  const std::size_t start = oracle.queries();
  RecentScores recent;
  BitString x(n);
  std::vector<Position> pool(n);
  std::iota(pool.begin(), pool.end(), Position{1});
  std::vector<Position> images(n);
  identify_sequentially(oracle, x, std::nullopt, 1, std::move(pool), images, recent, truth);

  SolveResult result;
  result.secret = Secret(std::move(x), Permutation(std::move(images)));
  result.queries = oracle.queries() - start;
  if (oracle.sink()) result.transcript = *oracle.sink();
  return result;
}

}  // namespace hiperm
