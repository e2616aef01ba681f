#include "hiperm/knowledge.hpp"

#include <algorithm>
#include <numeric>

#include <json.hpp>

#include "hiperm/errors.hpp"

namespace hiperm {

namespace {

using Word = BitString::Word;
using Words = std::vector<Word>;

void check_query(std::size_t n, const BitString& query, int score) {
  if (query.size() != n)
    throw DimensionError("query length " + std::to_string(query.size()) + " != n = " +
                         std::to_string(n));
  if (score < 0 || static_cast<std::size_t>(score) > n)
    throw DimensionError("score " + std::to_string(score) + " outside [0.." + std::to_string(n) +
                         "]");
}

/// Positions where a and b agree.
BitString agreement(const BitString& a, const BitString& b) {
  BitString d = a ^ b;
  d ^= BitString::ones(a.size());
  return d;
}

// Greedy factors of a laminar family over a universe of the given size.
// Entries with full[k] set stand for the whole universe; others are sorted
// arrays of positions in [1..max_position]. Relies on laminarity in index
// order: a nonempty earlier set lies inside a later one iff its first
// element does.
std::vector<long long> laminar_factors(std::size_t universe, std::size_t max_position,
                                       const std::vector<char>& full,
                                       const std::vector<std::vector<Position>>& sets) {
  const std::size_t m = full.size();
  std::vector<long long> factors(m);
  std::vector<std::uint32_t> reps(max_position + 1, 0);
  long long empties = 0;
  long long fulls = 0;
  for (std::size_t k = 0; k < m; ++k) {
    if (full[k]) {
      factors[k] = static_cast<long long>(universe) - static_cast<long long>(k);
      ++fulls;
      continue;
    }
    const auto& v = sets[k];
    long long contained = empties;
    for (Position p : v) contained += reps[p];
    if (v.size() == universe) contained += fulls;
    factors[k] = static_cast<long long>(v.size()) - contained;
    if (v.empty())
      ++empties;
    else
      ++reps[v.front()];
  }
  return factors;
}

bool all_positive(const std::vector<long long>& factors) {
  return std::all_of(factors.begin(), factors.end(), [](long long f) { return f >= 1; });
}

}  // namespace

KnowledgeState::KnowledgeState(std::size_t n) : n_(n), sets_(n), full_(n, true) {
  if (n == 0) throw DimensionError("n must be >= 1");
}

bool KnowledgeState::contains(Position j, Position p) const {
  if (full_[j - 1]) return p >= 1 && p <= n_;
  const auto& v = sets_[j - 1];
  return std::binary_search(v.begin(), v.end(), p);
}

std::vector<Position> KnowledgeState::candidates(Position j) const {
  if (j < 1 || j > n_) throw DimensionError("index " + std::to_string(j) + " outside [1..n]");
  if (!full_[j - 1]) return sets_[j - 1];
  std::vector<Position> all(n_);
  std::iota(all.begin(), all.end(), Position{1});
  return all;
}

void KnowledgeState::intersect(Position j, const BitString& agree) {
  auto& v = sets_[j - 1];
  if (full_[j - 1]) {
    v.clear();
    agree.for_each_set([&](Position p) { v.push_back(p); });
    full_[j - 1] = false;
  } else {
    std::erase_if(v, [&](Position p) { return !agree.get(p); });
  }
}

void KnowledgeState::subtract(Position j, const BitString& agree) {
  auto& v = sets_[j - 1];
  if (full_[j - 1]) {
    v.clear();
    for (std::size_t p = 1; p <= n_; ++p)
      if (!agree.get(static_cast<Position>(p))) v.push_back(static_cast<Position>(p));
    full_[j - 1] = false;
  } else {
    std::erase_if(v, [&](Position p) { return agree.get(p); });
  }
}

void KnowledgeState::update(const BitString& query, int s) {
  check_query(n_, query, s);
  if (!best_query_) {
    best_query_ = query;
    best_score_ = s;
    return;
  }
  const BitString agree = agreement(query, *best_query_);
  const int best = best_score_;
  if (s < best) {
    for (int i = 1; i <= s; ++i) intersect(static_cast<Position>(i), agree);
    subtract(static_cast<Position>(s + 1), agree);
  } else if (s == best) {
    const int last = std::min<int>(best + 1, static_cast<int>(n_));
    for (int i = 1; i <= last; ++i) intersect(static_cast<Position>(i), agree);
  } else {
    for (int i = 1; i <= best; ++i) intersect(static_cast<Position>(i), agree);
    subtract(static_cast<Position>(best + 1), agree);
    best_query_ = query;
    best_score_ = s;
  }
}

KnowledgeState KnowledgeState::from_history(const Transcript& h) {
  const std::size_t n = h.n;
  KnowledgeState st(n);
  if (h.entries.empty()) return st;
  for (const auto& e : h.entries) check_query(n, e.query, e.score);

  std::size_t best_index = 0;
  for (std::size_t k = 1; k < h.entries.size(); ++k)
    if (h.entries[k].score > h.entries[best_index].score) best_index = k;
  const int best = h.entries[best_index].score;
  st.best_query_ = h.entries[best_index].query;
  st.best_score_ = best;

  const std::size_t words = (n + BitString::kWordBits - 1) / BitString::kWordBits;
  const std::size_t rows = std::min<std::size_t>(n, static_cast<std::size_t>(best) + 1);
  // excluded[j-1] collects positions ruled out for pi(j).
  std::vector<Words> excluded(rows, Words(words, 0));

  // Queries grouped by score; "some query has bit 1 / all have bit 1" per group.
  std::vector<Words> any_one(n + 1, Words(words, 0));
  std::vector<Words> all_one(n + 1, Words(words, ~Word{0}));
  std::vector<char> present(n + 1, 0);
  for (const auto& e : h.entries) {
    const auto q = e.query.words();
    for (std::size_t w = 0; w < words; ++w) {
      any_one[e.score][w] |= q[w];
      all_one[e.score][w] &= q[w];
    }
    present[e.score] = 1;
  }

  // Equal scores s disagreeing at i exclude i from V_{s+1}.
  for (std::size_t s = 0; s + 1 <= rows; ++s)
    if (present[s])
      for (std::size_t w = 0; w < words; ++w) excluded[s][w] |= any_one[s][w] & ~all_one[s][w];

  // Sweep thresholds downward; "above" aggregates queries with score > s.
  Words above_any(words, 0), above_all(words, ~Word{0});
  bool above_present = false;
  for (int s = best; s >= 0; --s) {
    if (above_present && present[s]) {
      // A lower score s agreeing at i with a higher score excludes
      // i from V_{s+1}.
      for (const auto& e : h.entries) {
        if (e.score != s) continue;
        const auto q = e.query.words();
        for (std::size_t w = 0; w < words; ++w)
          excluded[s][w] |= (q[w] & above_any[w]) | (~q[w] & ~above_all[w]);
      }
    }
    if (present[s]) {
      for (std::size_t w = 0; w < words; ++w) {
        above_any[w] |= any_one[s][w];
        above_all[w] &= all_one[s][w];
      }
      above_present = true;
    }
    // All queries scoring >= s must agree at i, or i leaves V_s.
    // above_* now covers scores >= s.
    if (s >= 1)
      for (std::size_t w = 0; w < words; ++w) excluded[s - 1][w] |= above_any[w] & ~above_all[w];
  }

  for (std::size_t j = 0; j < rows; ++j) {
    std::vector<Position> kept;
    for (std::size_t p = 1; p <= n; ++p) {
      const std::size_t k = p - 1;
      if (!((excluded[j][k / BitString::kWordBits] >> (k % BitString::kWordBits)) & 1u))
        kept.push_back(static_cast<Position>(p));
    }
    if (kept.size() != n) {
      st.sets_[j] = std::move(kept);
      st.full_[j] = false;
    }
  }
  return st;
}

bool KnowledgeState::is_laminar() const {
  for (std::size_t i = 1; i <= n_; ++i) {
    const auto vi = candidates(static_cast<Position>(i));
    for (std::size_t j = i + 1; j <= n_; ++j) {
      std::size_t inside = 0;
      for (Position p : vi)
        if (contains(static_cast<Position>(j), p)) ++inside;
      if (inside != 0 && inside != vi.size()) return false;
    }
  }
  return true;
}

bool operator==(const KnowledgeState& a, const KnowledgeState& b) {
  if (a.n_ != b.n_ || a.best_query_ != b.best_query_) return false;
  if (a.best_query_ && a.best_score_ != b.best_score_) return false;
  for (std::size_t j = 1; j <= a.n_; ++j) {
    const auto p = static_cast<Position>(j);
    if (a.set_size(p) != b.set_size(p)) return false;
    if (a.is_full(p) || b.is_full(p)) continue;  // equal size n means both are [n]
    if (a.sets_[j - 1] != b.sets_[j - 1]) return false;
  }
  return true;
}

KnowledgeState update_incremental(KnowledgeState state, const BitString& query, int score) {
  state.update(query, score);
  return state;
}

std::vector<long long> greedy_factors(const KnowledgeState& state) {
  const std::size_t n = state.n();
  std::vector<char> full(n);
  std::vector<std::vector<Position>> sets(n);
  for (std::size_t j = 1; j <= n; ++j) {
    const auto p = static_cast<Position>(j);
    full[j - 1] = state.is_full(p);
    if (!full[j - 1]) sets[j - 1] = state.candidates(p);
  }
  return laminar_factors(n, n, full, sets);
}

bool is_feasible(const KnowledgeState& state) { return all_positive(greedy_factors(state)); }

BigCount count_consistent(const KnowledgeState& state) {
  const auto factors = greedy_factors(state);
  if (!all_positive(factors)) return 0;
  BigCount count = 1;
  for (long long f : factors) count *= f;
  const std::size_t n = state.n();
  std::size_t free_bits = n;
  if (const auto best = state.best_score())
    free_bits = static_cast<std::size_t>(*best) == n ? 0 : n - static_cast<std::size_t>(*best) - 1;
  count <<= static_cast<unsigned>(free_bits);
  return count;
}

Secret witness(const KnowledgeState& state) {
  if (!is_feasible(state)) throw PreconditionError("witness: no secret is consistent");
  const std::size_t n = state.n();
  std::vector<char> used(n + 1, 0);
  std::vector<Position> images(n);
  std::size_t next_free = 1;
  for (std::size_t j = 1; j <= n; ++j) {
    const auto idx = static_cast<Position>(j);
    Position pick = 0;
    if (state.is_full(idx)) {
      while (next_free <= n && used[next_free]) ++next_free;
      if (next_free <= n) pick = static_cast<Position>(next_free);
    } else {
      for (Position p : state.candidates(idx))
        if (!used[p]) {
          pick = p;
          break;
        }
    }
    if (pick == 0) throw PreconditionError("witness: greedy matching ran out of candidates");
    used[pick] = 1;
    images[j - 1] = pick;
  }
  Permutation pi(std::move(images));

  BitString z(n);
  if (const auto& best = state.best_query()) {
    const auto s = static_cast<std::size_t>(*state.best_score());
    for (std::size_t j = 1; j <= s; ++j) {
      const Position p = pi.image(static_cast<Position>(j));
      z.set(p, best->get(p));
    }
    if (s < n) {
      const Position p = pi.image(static_cast<Position>(s + 1));
      z.set(p, !best->get(p));
    }
  }
  return Secret(std::move(z), std::move(pi));
}

std::vector<Position> feasible_values(const KnowledgeState& state, Position i) {
  const std::size_t n = state.n();
  if (i < 1 || i > n) throw DimensionError("index " + std::to_string(i) + " outside [1..n]");
  if (!is_feasible(state)) throw PreconditionError("feasible_values: infeasible state");

  std::vector<Position> result;
  for (Position l : state.candidates(i)) {
    // Perfect matching in G minus {i, l}: drop index i and position l.
    std::vector<char> full;
    std::vector<std::vector<Position>> sets;
    full.reserve(n - 1);
    sets.reserve(n - 1);
    for (std::size_t j = 1; j <= n; ++j) {
      const auto idx = static_cast<Position>(j);
      if (idx == i) continue;
      full.push_back(state.is_full(idx));
      sets.emplace_back();
      if (!full.back()) {
        sets.back() = state.candidates(idx);
        std::erase(sets.back(), l);
      }
    }
    if (all_positive(laminar_factors(n - 1, n, full, sets))) result.push_back(l);
  }
  return result;
}

std::string VerifyReport::to_json() const {
  nlohmann::json j;
  j["entries"] = entries;
  j["feasible"] = feasible();
  j["feasible_prefixes"] = feasible_prefixes;
  j["first_infeasible"] = first_infeasible ? nlohmann::json(*first_infeasible) : nlohmann::json();
  j["final_count"] = final_count.str();
  j["unique"] = unique;
  j["replay_ok"] = replay_ok ? nlohmann::json(*replay_ok) : nlohmann::json();
  if (first_replay_mismatch) j["first_replay_mismatch"] = *first_replay_mismatch;
  return j.dump();
}

VerifyReport verify_transcript(const Transcript& h, const Secret* secret) {
  VerifyReport report;
  report.entries = h.entries.size();

  auto state_after = [&](std::size_t k) {
    KnowledgeState st(h.n);
    for (std::size_t e = 0; e < k; ++e) st.update(h.entries[e].query, h.entries[e].score);
    return st;
  };

  const KnowledgeState final_state = state_after(h.entries.size());
  if (is_feasible(final_state)) {
    report.feasible_prefixes = h.entries.size();
  } else {
    // Consistent sets only shrink along a transcript, so the infeasible
    // prefixes form a suffix of lengths; find where it starts.
    std::size_t lo = 0, hi = h.entries.size();  // prefix lo feasible, prefix hi infeasible
    while (hi - lo > 1) {
      const std::size_t mid = lo + (hi - lo) / 2;
      if (is_feasible(state_after(mid)))
        lo = mid;
      else
        hi = mid;
    }
    report.feasible_prefixes = lo;
    report.first_infeasible = hi;
  }
  report.final_count = count_consistent(final_state);
  report.unique = report.final_count == 1;

  if (secret) {
    if (secret->size() != h.n) throw DimensionError("secret size does not match transcript");
    SecretOracle oracle(*secret);
    report.replay_ok = true;
    for (std::size_t e = 0; e < h.entries.size(); ++e) {
      if (oracle.evaluate(h.entries[e].query) != h.entries[e].score) {
        report.replay_ok = false;
        report.first_replay_mismatch = e + 1;
        break;
      }
    }
  }
  return report;
}

}  // namespace hiperm
