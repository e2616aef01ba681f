// Acceptance run: one PASS/FAIL line per criterion.
// Usage: acceptance [criterion numbers...]   (default: all)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "brute_force.hpp"
#include "hiperm/adversary.hpp"
#include "hiperm/errors.hpp"
#include "hiperm/harness.hpp"
#include "hiperm/knowledge.hpp"
#include "hiperm/solver_det.hpp"
#include "hiperm/solver_rand.hpp"

using namespace hiperm;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += "violated: " + what;
    }
  }
  void note(const std::string& s) {
    if (!detail.empty()) detail += "; ";
    detail += s;
  }
};

std::string fmt(double v) { return format_g6(v); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ScoredString prefix_string(const Secret& s, Position i) {
  BitString x = s.z;
  x.flip(s.pi.image(i));
  return {x, static_cast<int>(i) - 1};
}

// 1. Exact recovery on uniform and hard secrets.
Outcome correctness() {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  std::size_t runs = 0, failures = 0;
  RandomSource master(101);
  for (std::size_t n : {16u, 64u, 256u, 1024u}) {
    for (SecretDist dist : {SecretDist::uniform, SecretDist::hard}) {
      for (std::size_t trial = 0; trial < 500; ++trial) {
        RandomSource rng = master.split(n).split(static_cast<std::uint64_t>(dist)).split(trial);
        RandomSource secret_rng = rng.split(0);
        const Secret s = generate(dist, n, secret_rng);
        {
          SecretOracle o(s);
          OracleHandle h = o.handle();
          failures += solve_det(h, n).secret == s ? 0 : 1;
        }
        {
          SecretOracle o(s);
          OracleHandle h = o.handle();
          failures += solve_rand(h, n, LevelConfig::make(n), rng.split(1)).secret == s ? 0 : 1;
        }
        runs += 2;
      }
    }
  }
  const double secs = seconds_since(t0);
  out.require(failures == 0, std::to_string(failures) + " wrong recoveries");
  out.require(secs < 120, "runtime < 120 s");
  out.note(std::to_string(runs) + " solves, " + std::to_string(failures) + " failures, " + fmt(secs) + " s");
  return out;
}

// 2. Deterministic query bound and n log n scaling.
Outcome det_bound() {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  BenchConfig cfg;
  cfg.algo = Algo::det;
  cfg.ns = {256, 1024, 4096};
  cfg.trials = 50;
  cfg.master_seed = 202;
  cfg.record_time = false;
  const auto recs = run_bench(cfg);
  std::size_t over = 0, failed = 0;
  for (const auto& r : recs) {
    over += r.queries > det_query_bound(r.n) ? 1 : 0;
    failed += r.success ? 0 : 1;
  }
  // The hard distribution as well, at every size of criterion 1.
  RandomSource master(203);
  for (std::size_t n : {16u, 64u, 256u, 1024u}) {
    for (std::size_t trial = 0; trial < 100; ++trial) {
      RandomSource rng = master.split(n).split(trial);
      const Secret s = gen_hard(n, rng);
      SecretOracle o(s);
      OracleHandle h = o.handle();
      const SolveResult r = solve_det(h, n);
      over += r.queries > det_query_bound(n) ? 1 : 0;
      failed += r.secret == s ? 0 : 1;
    }
  }
  const auto rows = scaling_table(recs);
  double lo = 1e300, hi = 0;
  std::string ratios;
  for (const auto& row : rows) {
    lo = std::min(lo, row.per_n_log_n);
    hi = std::max(hi, row.per_n_log_n);
    ratios += (ratios.empty() ? "" : " ") + std::to_string(row.n) + ":" + fmt(row.per_n_log_n);
  }
  const double spread = (hi - lo) / lo;
  const double secs = seconds_since(t0);
  out.require(over == 0, std::to_string(over) + " runs above n(ceil(log2 n)+2)+2");
  out.require(failed == 0, std::to_string(failed) + " failed runs");
  out.require(spread < 0.20, "mean/(n log2 n) spread < 20%");
  out.require(secs < 60, "runtime < 60 s");
  out.note("mean/(n log2 n) " + ratios + ", spread " + fmt(100 * spread) + "%, " + fmt(secs) + " s");
  return out;
}

// 3. Randomized advantage with d = 2.
Outcome rand_advantage() {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  BenchConfig cfg;
  cfg.ns = {4096, 16384};
  cfg.trials = 50;
  cfg.master_seed = 303;
  cfg.d = 2;
  cfg.record_time = false;
  cfg.algo = Algo::det;
  const auto det_rows = scaling_table(run_bench(cfg));
  cfg.algo = Algo::rand;
  const auto rand_recs = run_bench(cfg);
  const auto rand_rows = scaling_table(rand_recs);
  std::size_t failed = 0;
  for (const auto& r : rand_recs) failed += r.success ? 0 : 1;
  for (std::size_t k = 0; k < 2; ++k) {
    out.require(rand_rows[k].mean_queries < det_rows[k].mean_queries,
                "rand mean < det mean at n=" + std::to_string(det_rows[k].n));
    out.note("n=" + std::to_string(det_rows[k].n) + " det " + fmt(det_rows[k].mean_queries) +
             " rand " + fmt(rand_rows[k].mean_queries) + " (rand/(n log2 log2 n) " +
             fmt(rand_rows[k].per_n_loglog_n) + ")");
  }
  const double growth = rand_rows[1].per_n_loglog_n / rand_rows[0].per_n_loglog_n;
  out.require(growth <= 1.10, "mean/(n log2 log2 n) non-increasing within +10%");
  out.require(failed == 0, std::to_string(failed) + " failed rand runs");
  const double secs = seconds_since(t0);
  out.require(secs < 600, "runtime < 600 s");
  out.note("growth " + fmt(growth) + ", " + fmt(secs) + " s");
  return out;
}

// 4. Knowledge calculus against exhaustive enumeration.
Outcome knowledge_oracle() {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  RandomSource master(404);
  std::size_t mismatches = 0, feasible = 0, infeasible = 0, bad_witness = 0;
  for (std::size_t n : {3u, 4u, 5u}) {
    RandomSource rng = master.split(n);
    for (int trial = 0; trial < 200; ++trial) {
      const Transcript h = brute::random_history(n, rng, 6, 0.35);
      const auto truth = brute::enumerate(n, h);
      KnowledgeState k(n);
      for (const auto& e : h.entries) k.update(e.query, e.score);
      bool ok = k == KnowledgeState::from_history(h);
      ok = ok && is_feasible(k) == (truth.count > 0);
      ok = ok && count_consistent(k) == truth.count;
      if (truth.count > 0) {
        ++feasible;
        for (Position i = 1; i <= n; ++i) {
          const std::vector<Position> expect(truth.values[i - 1].begin(), truth.values[i - 1].end());
          ok = ok && feasible_values(k, i) == expect;
        }
        const Secret w = witness(k);
        for (const auto& e : h.entries) bad_witness += score(w, e.query) != e.score ? 1 : 0;
      } else {
        ++infeasible;
      }
      mismatches += ok ? 0 : 1;
    }
  }
  const double secs = seconds_since(t0);
  out.require(mismatches == 0, std::to_string(mismatches) + " histories disagree with enumeration");
  out.require(bad_witness == 0, "witness replays its history");
  out.require(secs < 120, "runtime < 120 s");
  out.note("600 histories (" + std::to_string(feasible) + " feasible, " + std::to_string(infeasible) +
           " infeasible), " + fmt(secs) + " s");
  return out;
}

// 5. Randomized halving: exact query counts and uniform survivors.
Outcome rand_bin_search_check() {
  Outcome out;
  RandomSource master(505);
  std::size_t count_errors = 0, cases = 0;
  for (std::size_t v = 1; v <= 1024; v *= 2) {
    for (std::size_t target = 1; target <= v; target *= 2) {
      for (int rep = 0; rep < 3; ++rep) {
        RandomSource rng = master.split(v).split(target).split(rep);
        const Secret s = gen_uniform(1024, rng);
        SecretOracle o(s);
        OracleHandle h = o.handle();
        RandomizedSolver solver(h, LevelConfig::make(1024), rng.split(1), &s);
        std::vector<Position> V{s.pi.image(1)};
        for (Position p = 1; V.size() < v; ++p)
          if (p != s.pi.image(1)) V.push_back(p);
        const auto kept = solver.rand_bin_search(prefix_string(s, 1), 1, V, target);
        count_errors += h.queries() != ceil_log2(v) - ceil_log2(target) ? 1 : 0;
        count_errors += kept.size() != target ? 1 : 0;
        ++cases;
      }
    }
  }
  out.require(count_errors == 0, "query count equals ceil(log2 v) - ceil(log2 target)");

  // Survivor law at n = 16, v = 16, target = 4.
  const std::size_t runs = 20000;
  RandomSource secret_rng(506);
  const Secret s = gen_uniform(16, secret_rng);
  std::vector<std::size_t> hits(17, 0);
  std::vector<Position> all(16);
  std::iota(all.begin(), all.end(), Position{1});
  for (std::size_t r = 0; r < runs; ++r) {
    SecretOracle o(s);
    OracleHandle h = o.handle();
    RandomizedSolver solver(h, LevelConfig::make(16), RandomSource(507).split(r), &s);
    for (Position p : solver.rand_bin_search(prefix_string(s, 1), 1, all, 4)) ++hits[p];
  }
  const double p = 3.0 / 15.0;
  const double expect = runs * p;
  const double sigma = std::sqrt(runs * p * (1 - p));
  double chi2 = 0, worst = 0;
  for (Position q = 1; q <= 16; ++q) {
    if (q == s.pi.image(1)) {
      out.require(hits[q] == runs, "pi(1) always survives");
      continue;
    }
    const double dev = std::abs(static_cast<double>(hits[q]) - expect);
    worst = std::max(worst, dev / sigma);
    chi2 += (hits[q] - expect) * (hits[q] - expect) / expect;
  }
  // The 15 counts sum to a constant, so 14 degrees of freedom. The cell
  // statistic uses variance np rather than np(1-p), hence the rescaling.
  const double chi2_scaled = chi2 / (1 - p);
  const double chi2_limit = 14 + 3 * std::sqrt(28.0);
  out.require(worst <= 3.0, "every survivor frequency within 3 sigma of 3/15");
  out.require(chi2_scaled <= chi2_limit, "chi-square within 3 sigma");
  out.note(std::to_string(cases) + " count cases, max |z| " + fmt(worst) + ", chi2 " + fmt(chi2_scaled) +
           " (limit " + fmt(chi2_limit) + ")");
  return out;
}

// 6. ReductionStep cost is linear in k.
Outcome reduction_linearity() {
  Outcome out;
  const std::size_t n = 1024;
  RandomSource master(606);
  std::vector<double> per_k;
  std::size_t post_failures = 0;
  std::string shown;
  for (std::size_t k : {8u, 16u, 32u}) {
    std::uint64_t total = 0;
    for (int trial = 0; trial < 100; ++trial) {
      RandomSource rng = master.split(k).split(trial);
      const Secret s = gen_uniform(n, rng);
      SecretOracle o(s);
      OracleHandle h = o.handle();
      RandomizedSolver solver(h, LevelConfig::make(n), rng.split(1), &s);
      // J = {1..k}, each V_j of size k (so m = 1) around pi(j), disjoint.
      std::vector<std::vector<Position>> sets(k);
      std::vector<char> used(n + 1, 0);
      for (std::size_t j = 0; j < k; ++j) {
        sets[j].push_back(s.pi.image(static_cast<Position>(j + 1)));
        used[sets[j][0]] = 1;
      }
      std::vector<Position> rest;
      for (Position p = 1; p <= n; ++p)
        if (!used[p]) rest.push_back(p);
      rng.sample_front(std::span<Position>(rest), k * (k - 1));
      for (std::size_t j = 0; j < k; ++j) {
        sets[j].insert(sets[j].end(), rest.begin() + j * (k - 1), rest.begin() + (j + 1) * (k - 1));
        std::sort(sets[j].begin(), sets[j].end());
      }
      solver.load_state(sets, prefix_string(s, static_cast<Position>(k + 1)));
      std::vector<Position> J(k);
      std::iota(J.begin(), J.end(), Position{1});
      solver.reduction_step(k, J, 1);
      total += h.queries();
      for (Position j = 1; j <= k; ++j)
        post_failures += solver.candidates(j) == std::vector<Position>{s.pi.image(j)} ? 0 : 1;
    }
    const double mean_per_k = static_cast<double>(total) / 100.0 / static_cast<double>(k);
    per_k.push_back(mean_per_k);
    shown += (shown.empty() ? "" : " ") + std::to_string(k) + ":" + fmt(mean_per_k);
  }
  const double ratio = *std::max_element(per_k.begin(), per_k.end()) /
                       *std::min_element(per_k.begin(), per_k.end());
  out.require(ratio < 2.0, "mean queries/k within a factor 2");
  out.require(post_failures == 0, "|V_j| <= m after every step");
  out.note("mean queries/k " + shown + ", max/min " + fmt(ratio));
  return out;
}

// 7. Failure frequency per advance call at n = 65536, d = 4.
Outcome failure_rates() {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t n = 65536;
  const LevelConfig cfg = LevelConfig::make(n, 4);
  std::vector<std::size_t> calls(cfg.t, 0), fails(cfg.t, 0);
  std::size_t wrong = 0, checkpoints = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RandomSource rng = RandomSource(707).split(seed);
    RandomSource secret_rng = rng.split(0);
    const Secret s = gen_uniform(n, secret_rng);
    SecretOracle o(s);
    OracleHandle h = o.handle();
    // Failure-test exactness is checked on every call; the O(n) state
    // audits belong to criterion 9 and would dominate the runtime here.
    RandomizedSolver solver(h, cfg, rng.split(1), &s);
    solver.set_full_checks(false);
    wrong += solver.run().secret == s ? 0 : 1;
    const RandStats& st = solver.stats();
    for (std::size_t l = 0; l < cfg.t; ++l) {
      calls[l] += st.advance_calls.at(l);
      fails[l] += st.failures.at(l);
    }
    checkpoints += st.checkpoints;
  }
  for (std::size_t l = 1; l <= cfg.t; ++l) {
    const double a = static_cast<double>(cfg.alpha(l));
    const double bound = std::min(1.0, static_cast<double>(n) / static_cast<double>(n - cfg.q) /
                                           (std::pow(a, cfg.d - 1) - 1));
    const double N = static_cast<double>(calls[l - 1]);
    const double rate = N > 0 ? fails[l - 1] / N : 0.0;
    const double sigma = N > 0 ? std::sqrt(bound * (1 - bound) / N) : 0.0;
    out.require(rate <= bound + 3 * sigma, "level " + std::to_string(l) + " failure rate");
    out.note("level " + std::to_string(l) + ": " + std::to_string(fails[l - 1]) + "/" +
             std::to_string(calls[l - 1]) + " failures, bound " + fmt(bound) + " + 3 sigma " + fmt(3 * sigma) +
             ", target size " + std::to_string(cfg.target(l)));
  }
  const double secs = seconds_since(t0);
  out.require(wrong == 0, "exact recovery");
  out.require(secs < 1200, "runtime < 1200 s");
  out.note(std::to_string(checkpoints) + " instrumented checks, " + fmt(secs) + " s");
  return out;
}

// 8. Adversary forcing against the deterministic solver.
Outcome adversary_forcing() {
  Outcome out;
  auto det = [](OracleHandle& h, std::size_t n) { return solve_det(h, n); };
  std::map<std::size_t, std::size_t> forced;
  for (std::size_t n : {256u, 1024u}) {
    const ForcingResult r = play_adversary(det, n);
    forced[n] = r.forced;
    const double floor = 0.2 * static_cast<double>(n) * std::log2(static_cast<double>(n));
    out.require(static_cast<double>(r.forced) >= floor, "forced >= 0.2 n log2 n at n=" + std::to_string(n));
    const VerifyReport rep = verify_transcript(r.transcript, &r.committed);
    out.require(rep.replay_ok == true, "committed secret replays the transcript at n=" + std::to_string(n));
    out.require(r.recovered == r.committed, "solver output equals the committed secret");
    out.note("n=" + std::to_string(n) + " forced " + std::to_string(r.forced) + " (floor " + fmt(floor) + ")");
  }
  const double growth = static_cast<double>(forced[1024]) / static_cast<double>(forced[256]);
  out.require(growth > 4.0, "forced(1024)/forced(256) > 4");
  out.note("growth " + fmt(growth));
  return out;
}

// 9. Invariants at every instrumented checkpoint, and bench determinism.
Outcome invariant_suite() {
  Outcome out;
  std::size_t violations = 0, checkpoints = 0, knowledge_steps = 0;
  std::string first_violation;
  for (std::size_t n : {64u, 256u}) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      RandomSource rng = RandomSource(909).split(n).split(seed);
      RandomSource secret_rng = rng.split(0);
      const Secret s = gen_uniform(n, secret_rng);
      for (int d : {2, 4}) {
        SecretOracle o(s);
        Transcript t;
        t.n = n;
        OracleHandle h = o.handle(&t);
        RandStats st;
        try {
          if (solve_rand(h, n, LevelConfig::make(n, d), rng.split(d), &s, &st).secret != s)
            throw InvariantViolation("wrong recovery");
        } catch (const std::exception& e) {
          if (first_violation.empty()) first_violation = e.what();
          ++violations;
        }
        checkpoints += st.checkpoints;
        // The same history seen through the knowledge calculus: laminar
        // sets that always contain the true pi(j). Full laminarity checks
        // are cubic, so they run on the smaller size only.
        KnowledgeState k(n);
        for (const auto& e : t.entries) {
          k.update(e.query, e.score);
          ++knowledge_steps;
          bool ok = true;
          for (Position j = 1; j <= n && ok; ++j) ok = k.contains(j, s.pi.image(j));
          if (n == 64) ok = ok && k.is_laminar();
          if (!ok) {
            ++violations;
            if (first_violation.empty()) first_violation = "knowledge state lost soundness or laminarity";
            break;
          }
        }
      }
      SecretOracle o(s);
      OracleHandle h = o.handle();
      try {
        solve_det(h, n, &s);
      } catch (const std::exception& e) {
        if (first_violation.empty()) first_violation = e.what();
        ++violations;
      }
    }
  }
  out.require(violations == 0, std::to_string(violations) + " runs with a broken invariant" +
                                    (first_violation.empty() ? "" : " (" + first_violation + ")"));

  BenchConfig cfg;
  cfg.algo = Algo::rand;
  cfg.ns = {64, 256};
  cfg.trials = 20;
  cfg.d = 2;
  cfg.master_seed = 910;
  cfg.record_time = false;
  std::ostringstream one, eight;
  cfg.jobs = 1;
  write_trials_csv(one, run_bench(cfg));
  cfg.jobs = 8;
  write_trials_csv(eight, run_bench(cfg));
  out.require(one.str() == eight.str(), "trial CSV identical for jobs 1 and 8");
  out.note(std::to_string(checkpoints) + " solver checkpoints, " + std::to_string(knowledge_steps) +
           " knowledge steps, CSV identical: " + (one.str() == eight.str() ? "yes" : "no"));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"exact recovery, det and rand, n in {16,64,256,1024}", correctness},
      {"deterministic bound and n log n scaling", det_bound},
      {"randomized beats deterministic at d=2", rand_advantage},
      {"knowledge calculus equals enumeration", knowledge_oracle},
      {"randomized halving counts and uniformity", rand_bin_search_check},
      {"reduction step linear in k", reduction_linearity},
      {"failure rate per advance call at n=65536", failure_rates},
      {"adversary forces n log n queries", adversary_forcing},
      {"instrumented invariants and bench determinism", invariant_suite},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

  bool all = true;
  for (std::size_t c = 0; c < criteria.size(); ++c) {
    const int id = static_cast<int>(c + 1);
    if (!wanted.empty() && !wanted.count(id)) continue;
    Outcome o;
    try {
      o = criteria[c].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.note(std::string("exception: ") + e.what());
    }
    std::printf("criterion %d: %s  %s  [%s]\n", id, o.pass ? "PASS" : "FAIL", criteria[c].first,
                o.detail.c_str());
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
