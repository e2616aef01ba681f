#include "hiperm/adversary.hpp"

#include <algorithm>
#include <numeric>

#include "hiperm/errors.hpp"

namespace hiperm {

Adversary::Adversary(std::size_t n, AdversaryOptions opts)
    : n_(n), z_(n), resolved_(n + 1, 0) {
  if (n == 0) throw DimensionError("adversary needs n >= 1");
  if (opts.track_knowledge) knowledge_.emplace(n);
}

int Adversary::prefix_score(const BitString& x) const {
  for (std::size_t j = 0; j < prefix_images_.size(); ++j) {
    const Position p = prefix_images_[j];
    if (x.get(p) != z_.get(p)) return static_cast<int>(j);
  }
  return -1;  // agrees with the whole prefix
}

void Adversary::open_block(const BitString& x) {
  block_best_ = x;
  block_v1_.clear();
  for (std::size_t p = 1; p <= n_; ++p)
    if (!resolved_[p]) block_v1_.push_back(static_cast<Position>(p));
  block_v2_ = block_v1_;
  block_universe_ = block_v1_.size();
  block_answers_ = 1;
}

void Adversary::resolve_into(std::vector<Position>& images, BitString& z, const BitString& best,
                             const std::vector<Position>& v1, const std::vector<Position>& v2) {
  const Position i1 = v1.front();
  images.push_back(i1);
  z.set(i1, best.get(i1));
  for (Position i2 : v2) {
    if (i2 == i1) continue;
    images.push_back(i2);
    z.set(i2, !best.get(i2));
    return;
  }
}

void Adversary::resolve_block() {
  const std::size_t before = prefix_images_.size();
  resolve_into(prefix_images_, z_, *block_best_, block_v1_, block_v2_);
  for (std::size_t j = before; j < prefix_images_.size(); ++j) resolved_[prefix_images_[j]] = 1;
  blocks_.push_back({block_universe_, block_answers_});
  block_best_.reset();
  block_v1_.clear();
  block_v2_.clear();
  maybe_commit_all();
}

void Adversary::maybe_commit_all() {
  if (2 * prefix_images_.size() >= n_ && !final_)
    final_ = std::make_unique<SecretOracle>(committed_secret());
}

Secret Adversary::committed_secret() const {
  std::vector<Position> images = prefix_images_;
  BitString z = z_;
  std::vector<char> used = resolved_;
  if (block_best_) {
    resolve_into(images, z, *block_best_, block_v1_, block_v2_);
    for (std::size_t j = prefix_images_.size(); j < images.size(); ++j) used[images[j]] = 1;
  }
  for (std::size_t p = 1; p <= n_; ++p)
    if (!used[p]) images.push_back(static_cast<Position>(p));
  return Secret(std::move(z), Permutation(std::move(images)));
}

int Adversary::answer(const BitString& x) {
  if (x.size() != n_) throw DimensionError("adversary: query length mismatch");
  int result;
  if (final_) {
    result = final_->evaluate(x);
  } else if (const int early = prefix_score(x); early >= 0) {
    result = early;
  } else {
    const int p = static_cast<int>(prefix_images_.size());
    if (!block_best_) {
      open_block(x);
      result = p + 1;
      if (block_v1_.size() == 1) {
        // Only one free position left: it is pi(p+1) and x matches there.
        prefix_images_.push_back(block_v1_.front());
        z_.set(block_v1_.front(), x.get(block_v1_.front()));
        resolved_[block_v1_.front()] = 1;
        blocks_.push_back({block_universe_, block_answers_});
        block_best_.reset();
        block_v1_.clear();
        block_v2_.clear();
        maybe_commit_all();
      } else if (block_v1_.size() == 2) {
        resolve_block();
      }
    } else {
      ++block_answers_;
      const BitString& best = *block_best_;
      std::vector<Position> agree, differ;
      for (Position q : block_v1_) (x.get(q) == best.get(q) ? agree : differ).push_back(q);
      if (agree.size() > differ.size()) {
        // Relative score 1: V_1 and V_2 intersect with the agreement set.
        block_v1_ = std::move(agree);
        std::erase_if(block_v2_, [&](Position q) { return x.get(q) != best.get(q); });
        result = p + 1;
      } else {
        // Relative score 0: V_1 loses the agreement set, V_2 unchanged.
        block_v1_ = std::move(differ);
        result = p;
      }
      if (block_v1_.size() <= 2) resolve_block();
    }
  }
  max_score_ = std::max(max_score_, result);
  if (knowledge_) {
    knowledge_->update(x, result);
    if (!is_feasible(*knowledge_))
      throw InvariantViolation("adversary answered into an infeasible history");
  }
  return result;
}

OracleHandle Adversary::handle(Transcript* sink, std::size_t cap) {
  return OracleHandle(n_, [this](const BitString& x) { return answer(x); }, sink, cap);
}

ForcingResult play_adversary(const DetSolverFn& solver, std::size_t n, AdversaryOptions opts) {
  Adversary adversary(n, opts);
  ForcingResult out;
  const std::size_t lg = std::max<std::size_t>(1, ceil_log2(n));
  const std::size_t cap = 10 * n * lg * lg;
  std::size_t asked = 0;
  std::optional<std::size_t> reached;
  OracleHandle handle(
      n,
      [&](const BitString& x) {
        const int s = adversary.answer(x);
        ++asked;
        if (!reached && 2 * static_cast<std::size_t>(s) >= n) reached = asked;
        return s;
      },
      &out.transcript, cap);
  SolveResult r = solver(handle, n);
  out.total = handle.queries();
  out.forced = reached.value_or(out.total);
  out.committed = adversary.committed_secret();
  out.recovered = std::move(r.secret);
  return out;
}

std::size_t forced_queries(const DetSolverFn& solver, std::size_t n) {
  return play_adversary(solver, n).forced;
}

}  // namespace hiperm
