#include "hiperm/solver_rand.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hiperm/errors.hpp"

namespace hiperm {

namespace {

// base^exp, or limit+1 once it exceeds limit.
std::size_t saturating_pow(std::size_t base, int exp, std::size_t limit) {
  std::size_t r = 1;
  for (int e = 0; e < exp; ++e) {
    if (r > limit / base) return limit + 1;
    r *= base;
  }
  return r;
}

std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

}  // namespace

LevelConfig LevelConfig::make(std::size_t n, int d, std::optional<double> q_frac, int c) {
  if (n == 0) throw DimensionError("n must be >= 1");
  if (d < 1) throw DimensionError("d must be >= 1");
  // (1 - 1/k)^{ck} <= 1/e < 1/2 holds for every k >= 1 once c >= 1.
  if (c < 1) throw DimensionError("c must be >= 1");
  LevelConfig cfg;
  cfg.n = n;
  cfg.d = d;
  cfg.c = c;

  std::size_t alpha = std::max<std::size_t>(2, ceil_log2(n));
  const std::size_t first = alpha;
  while (alpha <= n && saturating_pow(alpha, d, n) <= n) {
    cfg.alphas.push_back(alpha);
    if (alpha > n / alpha) break;
    alpha *= alpha;
  }
  if (cfg.alphas.empty()) cfg.alphas.push_back(first);
  cfg.t = cfg.alphas.size();
  for (std::size_t a : cfg.alphas) {
    const std::size_t power = saturating_pow(a, d, n);
    cfg.targets.push_back(power > n ? 1 : std::max<std::size_t>(1, ceil_div(n, power)));
  }

  if (q_frac) {
    if (!(*q_frac >= 0.0 && *q_frac <= 1.0)) throw DimensionError("q_frac must lie in [0, 1]");
    cfg.q = std::min(n - 1, static_cast<std::size_t>(std::floor(*q_frac * static_cast<double>(n))));
  } else {
    cfg.q = n - ceil_div(n, first);
  }
  return cfg;
}

RandomizedSolver::RandomizedSolver(OracleHandle& oracle, LevelConfig cfg, RandomSource rng,
                                   const Secret* truth)
    : oracle_(oracle),
      cfg_(std::move(cfg)),
      rng_(std::move(rng)),
      truth_(truth),
      n_(cfg_.n),
      sets_(n_),
      owner_(n_ + 1, 0),
      owned_(n_),
      free_(n_),
      free_index_(n_ + 1, 0) {
  if (n_ == 0 || oracle_.n() != n_) throw DimensionError("RandomizedSolver: size mismatch");
  if (truth_ && truth_->size() != n_) throw DimensionError("RandomizedSolver: truth size mismatch");
  for (std::size_t k = 0; k < n_; ++k) {
    free_[k] = static_cast<Position>(k + 1);
    free_index_[k + 1] = k;
  }
  stats_.advance_calls.assign(cfg_.t, 0);
  stats_.failures.assign(cfg_.t, 0);
}

int RandomizedSolver::query(const BitString& b) { return oracle_.query(b); }

void RandomizedSolver::claim(Position p, Position j) {
  owner_[p] = j;
  owned_.set(p, true);
  const std::size_t idx = free_index_[p];
  const Position last = free_.back();
  free_[idx] = last;
  free_index_[last] = idx;
  free_.pop_back();
}

void RandomizedSolver::release(Position p) {
  owner_[p] = 0;
  owned_.set(p, false);
  free_index_[p] = free_.size();
  free_.push_back(p);
}

void RandomizedSolver::drop_front(Position j, std::size_t count) {
  auto& v = sets_[j - 1];
  for (std::size_t k = 0; k < count; ++k) release(v[k]);
  v.erase(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(count));
}

void RandomizedSolver::keep_front(Position j, std::size_t count) {
  auto& v = sets_[j - 1];
  for (std::size_t k = count; k < v.size(); ++k) release(v[k]);
  v.resize(count);
}

void RandomizedSolver::load_state(std::vector<std::vector<Position>> sets, ScoredString x) {
  for (std::size_t j = 1; j <= s_; ++j) keep_front(static_cast<Position>(j), 0);
  s_ = sets.size();
  if (s_ > n_) throw DimensionError("load_state: more sets than indices");
  for (std::size_t j = 1; j <= s_; ++j) {
    for (Position p : sets[j - 1]) {
      if (p < 1 || p > n_ || owner_[p] != 0)
        throw PreconditionError("load_state: sets must be disjoint subsets of [n]");
      claim(p, static_cast<Position>(j));
    }
    sets_[j - 1] = std::move(sets[j - 1]);
  }
  x_ = std::move(x);
}

std::vector<Position> RandomizedSolver::rand_bin_search(const ScoredString& x, Position i,
                                                        std::vector<Position> V,
                                                        std::size_t target) {
  const int s = static_cast<int>(i) - 1;
  if (x.score != s) throw PreconditionError("rand_bin_search: f(x) != i-1");
  if (target == 0) throw PreconditionError("rand_bin_search: target must be >= 1");
  while (V.size() > target) {
    const std::size_t half = (V.size() + 1) / 2;
    rng_.sample_front(std::span<Position>(V), half);
    BitString y = x.bits;
    y.flip(std::span<const Position>(V.data(), half));
    const int f = query(y);
    if (f < s) throw InconsistencyError("rand_bin_search: score fell below i-1");
    if (f == s)
      V.erase(V.begin(), V.begin() + static_cast<std::ptrdiff_t>(half));
    else
      V.resize(half);
    if (auditing()) {
      ++stats_.checkpoints;
      if (std::find(V.begin(), V.end(), truth_->pi.image(i)) == V.end())
        throw InvariantViolation("rand_bin_search: pi(i) left V");
    }
  }
  V.shrink_to_fit();  // V started as a copy of the whole free pool
  return V;
}

bool RandomizedSolver::failure_test() {
  y_.bits = x_.bits;
  y_.bits.flip_outside(owned_);
  y_.score = query(y_.bits);
  const int s = static_cast<int>(s_);
  const bool failed = (x_.score > s && y_.score > s) || (x_.score == s && y_.score == s);
  if (truth_) check_failure_exact(failed);
  if (!failed && x_.score > s) std::swap(x_, y_);
  return failed;
}

void RandomizedSolver::check_failure_exact(bool failed) {
  ++stats_.checkpoints;
  if (s_ >= n_) return;
  const Position next = truth_->pi.image(static_cast<Position>(s_ + 1));
  if (failed != (owner_[next] != 0))
    throw InvariantViolation("failure test disagrees with pi(s+1) in union of V_j");
}

AdvanceResult RandomizedSolver::advance(std::size_t level, std::size_t capacity) {
  if (level < 1 || level > cfg_.t) throw DimensionError("advance: level outside [1..t]");
  ++stats_.advance_calls[level - 1];
  AdvanceResult result;
  const std::size_t start = oracle_.queries();
  while (result.J.size() < capacity && s_ < cfg_.q) {
    if (level == 1) {
      checkpoint("advance(1) iteration");
      const Position i = static_cast<Position>(s_ + 1);
      std::vector<Position> v = rand_bin_search(x_, i, free_, cfg_.target(1));
      ++s_;
      for (Position p : v) claim(p, i);
      sets_[i - 1] = std::move(v);
      result.J.push_back(i);
      x_ = std::move(y_);  // f(x) >= s now
    } else {
      const std::size_t child_cap =
          std::min(cfg_.alpha(level - 1), capacity - result.J.size());
      AdvanceResult child = advance(level - 1, child_cap);
      size_reduction(cfg_.alpha(level - 1), child.J, cfg_.target(level));
      result.J.insert(result.J.end(), child.J.begin(), child.J.end());
    }
    if (failure_test()) {
      ++stats_.failures[level - 1];
      result.failed = true;
      break;
    }
  }
  if (level == 1)
    stats_.max_level1_call_queries =
        std::max(stats_.max_level1_call_queries, oracle_.queries() - start);
  if (truth_) {
    ++stats_.checkpoints;
    for (Position j : result.J)
      if (sets_[j - 1].size() > cfg_.target(level))
        throw InvariantViolation("advance: returned set above level target");
  }
  return result;
}

void RandomizedSolver::size_reduction(std::size_t k, const std::vector<Position>& J,
                                      std::size_t m) {
  if (J.empty()) return;
  if (k < 2) k = 2;
  std::size_t cur = 0;
  for (Position j : J) cur = std::max(cur, sets_[j - 1].size());
  while (cur > m) {
    const std::size_t next = std::max(m, ceil_div(cur, k));
    reduction_step(k, J, next);
    cur = next;
  }
}

void RandomizedSolver::reduction_step(std::size_t k, const std::vector<Position>& J,
                                      std::size_t m) {
  if (m == 0 || k == 0) throw PreconditionError("reduction_step: k and m must be >= 1");
  std::vector<Position> live;
  for (Position j : J) {
    if (j < 1 || j > s_) throw PreconditionError("reduction_step: index outside [1..s]");
    if (sets_[j - 1].size() > k * m)
      throw PreconditionError("reduction_step: |V_j| > k*m");
    if (sets_[j - 1].size() > m) live.push_back(j);
  }
  if (live.empty()) return;
  ++stats_.reduction_steps;
  std::sort(live.begin(), live.end());
  if (x_.score < static_cast<int>(live.back()))
    throw PreconditionError("reduction_step: f(x) < max J");

  std::vector<std::size_t> flip_count;  // parallel to live
  while (!live.empty()) {
    std::size_t off_trials = 0;
    const std::size_t phase_start = live.size();
    do {
      const Position max_live = live.back();
      BitString y = x_.bits;
      flip_count.resize(live.size());
      for (std::size_t a = 0; a < live.size(); ++a) {
        auto& v = sets_[live[a] - 1];
        flip_count[a] = ceil_div(v.size(), k);
        rng_.sample_front(std::span<Position>(v), flip_count[a]);
        y.flip(std::span<const Position>(v.data(), flip_count[a]));
      }
      const int f = query(y);
      if (f >= static_cast<int>(max_live)) {
        ++off_trials;
        for (std::size_t a = 0; a < live.size(); ++a) drop_front(live[a], flip_count[a]);
      } else {
        const auto hit = static_cast<Position>(f + 1);
        const auto it = std::lower_bound(live.begin(), live.end(), hit);
        if (it == live.end() || *it != hit)
          throw InconsistencyError("reduction_step: score " + std::to_string(f) +
                                   " points at an index outside J");
        const auto h = static_cast<std::size_t>(it - live.begin());
        keep_front(hit, flip_count[h]);
        for (std::size_t a = 0; a < h; ++a) drop_front(live[a], flip_count[a]);
      }
      std::erase_if(live, [&](Position j) { return sets_[j - 1].size() <= m; });
      checkpoint("reduction_step iteration");
    } while (!live.empty() &&
             !(off_trials >= static_cast<std::size_t>(cfg_.c) * k && 2 * live.size() <= phase_start));
    k = ceil_div(k, 2);
  }
}

void RandomizedSolver::finish_part2() {
  std::vector<Position> images(n_, 0);
  for (std::size_t j = 1; j <= s_; ++j) {
    if (sets_[j - 1].size() != 1)
      throw PreconditionError("finish_part2: V_" + std::to_string(j) + " is not a singleton");
    images[j - 1] = sets_[j - 1].front();
  }
  const std::size_t start = oracle_.queries();
  RecentScores recent;
  recent.remember(x_.bits, x_.score);
  identify_sequentially(oracle_, x_.bits, x_.score, static_cast<Position>(s_ + 1), free_, images,
                        recent, auditing() ? truth_ : nullptr);
  for (std::size_t j = s_ + 1; j <= n_; ++j) {
    sets_[j - 1] = {images[j - 1]};
  }
  stats_.part2_queries = oracle_.queries() - start;
  s_ = n_;
}

void RandomizedSolver::checkpoint(const char* where) {
  if (!auditing()) return;
  ++stats_.checkpoints;
  auto fail = [&](const std::string& what) {
    throw InvariantViolation(std::string(where) + ": " + what);
  };
  for (std::size_t j = 1; j <= s_; ++j) {
    const auto& v = sets_[j - 1];
    const Position target = truth_->pi.image(static_cast<Position>(j));
    bool has_target = false;
    for (Position p : v) {
      if (owner_[p] != j) fail("V_j not pairwise disjoint / ownership broken");
      has_target |= p == target;
    }
    if (!has_target) fail("pi(j) not in V_j for j = " + std::to_string(j));
  }
  std::size_t owned = 0;
  for (std::size_t p = 1; p <= n_; ++p) {
    if (owner_[p] > s_) fail("set beyond s is not [n]");
    if (owner_[p] != 0) ++owned;
  }
  if (owned + free_.size() != n_ || owned != owned_.count()) fail("free pool out of sync");
  if (score(*truth_, x_.bits) != x_.score) fail("cached f(x) is stale");
  if (x_.score < static_cast<int>(s_)) fail("f(x) < s");
}

SolveResult RandomizedSolver::run() {
  const std::size_t start = oracle_.queries();
  x_ = {BitString::zeros(n_), 0};
  x_.score = query(x_.bits);
  y_ = {BitString::ones(n_), 0};
  y_.score = query(y_.bits);
  if (x_.score > 0) std::swap(x_, y_);
  s_ = 0;

  bool retest = false;
  while (s_ < cfg_.q) {
    if (retest) {
      // All earlier sets are singletons now, so the test has to pass.
      if (failure_test()) throw InconsistencyError("failure persists with all sets singletons");
    }
    checkpoint("main loop");
    if (auditing()) {
      ++stats_.checkpoints;
      if (score(*truth_, y_.bits) <= static_cast<int>(s_) || x_.score != static_cast<int>(s_))
        throw InvariantViolation("main loop: f(x) = s < f(y) violated");
    }
    AdvanceResult r = advance(cfg_.t, cfg_.alpha(cfg_.t));
    if (r.J.empty()) throw InvariantViolation("advance(t) returned no indices");
    size_reduction(cfg_.alpha(cfg_.t), r.J, 1);
    retest = r.failed;
    if (truth_) {
      ++stats_.checkpoints;
      for (Position j : r.J)
        if (sets_[j - 1].size() != 1 || sets_[j - 1].front() != truth_->pi.image(j))
          throw InvariantViolation("size_reduction to 1 did not isolate pi(j)");
    }
  }
  stats_.phase1_queries = oracle_.queries() - start;
  finish_part2();

  SolveResult result;
  std::vector<Position> images(n_);
  for (std::size_t j = 0; j < n_; ++j) images[j] = sets_[j].front();
  result.secret = Secret(x_.bits, Permutation(std::move(images)));
  result.queries = oracle_.queries() - start;
  if (oracle_.sink()) result.transcript = *oracle_.sink();
  return result;
}

SolveResult solve_rand(OracleHandle& oracle, std::size_t n, const LevelConfig& cfg,
                       RandomSource rng, const Secret* truth, RandStats* stats_out) {
  if (cfg.n != n) throw DimensionError("solve_rand: config built for a different n");
  RandomizedSolver solver(oracle, cfg, std::move(rng), truth);
  SolveResult r = solver.run();
  if (stats_out) *stats_out = solver.stats();
  return r;
}

}  // namespace hiperm
