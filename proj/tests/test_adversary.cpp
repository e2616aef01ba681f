#include <doctest.h>

#include <cmath>

#include "hiperm/adversary.hpp"
#include "hiperm/errors.hpp"
#include "hiperm/knowledge.hpp"
#include "hiperm/solver_det.hpp"

using namespace hiperm;

namespace {

BitString differ_on(std::size_t n, std::initializer_list<Position> ps) {
  BitString x = BitString::zeros(n);
  for (Position p : ps) x.set(p, true);
  return x;
}

SolveResult det(OracleHandle& h, std::size_t n) { return solve_det(h, n); }

}  // namespace

TEST_CASE("first query scores 1") {
  for (std::size_t n : {2u, 5u, 64u}) {
    Adversary a(n);
    CHECK(a.answer(BitString::zeros(n)) == 1);
  }
}

TEST_CASE("larger half of V_1 is kept") {
  Adversary a(16);
  REQUIRE(a.answer(BitString::zeros(16)) == 1);
  CHECK(a.block_v1_size() == 16);
  // 8/8 split: ties keep the side where the query differs from the best.
  CHECK(a.answer(differ_on(16, {9, 10, 11, 12, 13, 14, 15, 16})) == 0);
  REQUIRE(a.block_v1_size() == 8);
  // V_1 = {9..16}. Agreeing on 9..13 and differing on 14..16 splits 5/3.
  CHECK(a.answer(differ_on(16, {14, 15, 16})) == 1);
  CHECK(a.block_v1_size() == 5);
  // Now V_1 = {9..13}; a 2/3 split keeps the differing three.
  CHECK(a.answer(differ_on(16, {11, 12, 13})) == 0);
  CHECK(a.block_v1_size() == 3);
  CHECK(a.resolved_prefix() == 0);
}

TEST_CASE("committed secret replays random play") {
  RandomSource rng(21);
  for (std::size_t n : {2u, 3u, 6u, 17u, 40u}) {
    for (int trial = 0; trial < 10; ++trial) {
      Adversary a(n, {.track_knowledge = true});
      Transcript t;
      t.n = n;
      OracleHandle h = a.handle(&t);
      BitString x = BitString::zeros(n);
      for (int k = 0; k < 120; ++k) {
        if (rng.below(3) == 0) {
          for (Position p = 1; p <= n; ++p) x.set(p, rng.coin());
        } else {
          x.flip(static_cast<Position>(1 + rng.below(n)));
        }
        h.query(x);
        const Secret c = a.committed_secret();
        for (const auto& e : t.entries) REQUIRE(score(c, e.query) == e.score);
      }
      CHECK(is_feasible(*a.knowledge()));
    }
  }
}

TEST_CASE("full game against the deterministic solver") {
  for (std::size_t n : {4u, 8u, 31u, 64u}) {
    const ForcingResult r = play_adversary(det, n, {.track_knowledge = true});
    CHECK(r.recovered == r.committed);
    CHECK(r.forced <= r.total);
    CHECK(r.total == r.transcript.size());
    const VerifyReport rep = verify_transcript(r.transcript, &r.committed);
    CHECK(rep.replay_ok == true);
    CHECK(rep.unique);
  }
  CHECK(forced_queries(det, 4) >= 2);
}

TEST_CASE("forcing grows like n log n") {
  const std::size_t f64 = forced_queries(det, 64);
  const std::size_t f256 = forced_queries(det, 256);
  CHECK(f64 >= 0.2 * 64 * 6);
  CHECK(f256 >= 0.2 * 256 * 8);
  CHECK(static_cast<double>(f256) / f64 > 4.0);
}

TEST_CASE("blocks account for every answer before the midpoint") {
  Adversary a(64);
  OracleHandle h = a.handle();
  solve_det(h, 64);
  CHECK(a.passing_through());
  CHECK(a.resolved_prefix() >= 32);
  CHECK(2 * a.blocks().size() >= 32);
  for (const auto& b : a.blocks()) {
    CHECK(b.answers >= 1);
    // V_1 at most halves per answer.
    if (b.universe > 2)
      CHECK(b.answers + 1 >= static_cast<std::size_t>(std::floor(std::log2(double(b.universe)))));
  }
}

TEST_CASE("V_1 stays inside V_2") {
  RandomSource rng(22);
  Adversary a(40);
  BitString x = BitString::zeros(40);
  for (int k = 0; k < 200; ++k) {
    x.flip(static_cast<Position>(1 + rng.below(40)));
    a.answer(x);
    if (!a.passing_through()) CHECK(a.block_v1_size() <= a.block_v2_size());
  }
}

TEST_CASE("runaway solvers are stopped") {
  auto stuck = [](OracleHandle& h, std::size_t n) -> SolveResult {
    for (;;) h.query(BitString::zeros(n));
  };
  CHECK_THROWS_AS(play_adversary(stuck, 8), RunawayError);
}
