#include "hiperm/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "hiperm/adversary.hpp"
#include "hiperm/knowledge.hpp"
#include "hiperm/solver_det.hpp"
#include "hiperm/solver_rand.hpp"

namespace hiperm {

std::string to_string(Algo a) {
  switch (a) {
    case Algo::det: return "det";
    case Algo::rand: return "rand";
    case Algo::adversary_det: return "adversary-det";
  }
  return "?";
}

Algo parse_algo(const std::string& s) {
  if (s == "det") return Algo::det;
  if (s == "rand") return Algo::rand;
  if (s == "adversary-det") return Algo::adversary_det;
  throw std::invalid_argument("unknown algorithm '" + s + "'");
}

std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t n, std::size_t trial) {
  return RandomSource(master_seed).split(n).split(trial).seed();
}

TrialRecord run_trial(const BenchConfig& cfg, std::size_t n, std::uint64_t seed) {
  TrialRecord rec;
  rec.n = n;
  rec.algo = cfg.algo;
  rec.seed = seed;
  const auto t0 = std::chrono::steady_clock::now();

  if (cfg.algo == Algo::adversary_det) {
    ForcingResult r = play_adversary(
        [](OracleHandle& h, std::size_t m) { return solve_det(h, m); }, n);
    rec.queries = r.forced;
    rec.success = r.recovered == r.committed;
    if (cfg.verify_transcripts) {
      const VerifyReport rep = verify_transcript(r.transcript, &r.committed);
      rec.success = rec.success && rep.unique && rep.replay_ok.value_or(false);
    }
  } else {
    const RandomSource root(seed);
    RandomSource secret_rng = root.split(0);
    const Secret secret = generate(cfg.dist, n, secret_rng);
    SecretOracle oracle(secret);
    Transcript transcript;
    OracleHandle handle = oracle.handle(cfg.verify_transcripts ? &transcript : nullptr);
    SolveResult r;
    if (cfg.algo == Algo::det) {
      r = solve_det(handle, n);
    } else {
      const LevelConfig lc = LevelConfig::make(n, cfg.d, cfg.q_frac, cfg.c);
      rec.d = cfg.d;
      rec.q_frac = lc.q_frac();
      r = solve_rand(handle, n, lc, root.split(1));
    }
    rec.queries = r.queries;
    rec.success = r.secret == secret;
    if (cfg.verify_transcripts) {
      const VerifyReport rep = verify_transcript(transcript, &r.secret);
      rec.success = rec.success && rep.unique && rep.replay_ok.value_or(false);
    }
  }
  if (cfg.record_time)
    rec.wall_ns = static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - t0)
            .count());
  return rec;
}

std::vector<TrialRecord> run_bench(const BenchConfig& cfg) {
  struct Job {
    std::size_t n;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (std::size_t n : cfg.ns)
    for (std::size_t t = 0; t < cfg.trials; ++t) jobs.push_back({n, trial_seed(cfg.master_seed, n, t)});

  std::vector<TrialRecord> records(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < jobs.size();) {
      try {
        records[k] = run_trial(cfg, jobs[k].n, jobs[k].seed);
      } catch (...) {
        // A crashing trial is a failed trial; keep the row.
        records[k] = TrialRecord{jobs[k].n, cfg.algo, jobs[k].seed, 0, 0, false, {}, {}};
      }
    }
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(cfg.jobs, jobs.size()));
  std::vector<std::thread> pool;
  for (std::size_t i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return records;
}

std::vector<ScalingRow> scaling_table(const std::vector<TrialRecord>& records) {
  struct Acc {
    std::size_t n;
    Algo algo;
    std::size_t count = 0;
    unsigned __int128 sum = 0, sum_sq = 0;
  };
  std::vector<Acc> groups;
  for (const auto& r : records) {
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](const Acc& a) { return a.n == r.n && a.algo == r.algo; });
    if (it == groups.end()) {
      groups.push_back({r.n, r.algo});
      it = groups.end() - 1;
    }
    ++it->count;
    it->sum += r.queries;
    it->sum_sq += static_cast<unsigned __int128>(r.queries) * r.queries;
  }
  std::vector<ScalingRow> rows;
  for (const auto& g : groups) {
    ScalingRow row;
    row.n = g.n;
    row.algo = g.algo;
    row.trials = g.count;
    const long double count = static_cast<long double>(g.count);
    row.mean_queries = static_cast<double>(static_cast<long double>(g.sum) / count);
    // N * sum(q^2) - sum(q)^2 is exact in 128 bits for any realistic run.
    const unsigned __int128 spread = g.count * g.sum_sq - g.sum * g.sum;
    row.stddev = static_cast<double>(std::sqrt(static_cast<long double>(spread)) / count);
    const double n = static_cast<double>(g.n);
    const double lg = std::log2(n);
    row.per_n_log_n = row.mean_queries / (n * lg);
    row.per_n_loglog_n = row.mean_queries / (n * std::log2(lg));
    rows.push_back(row);
  }
  return rows;
}

std::string format_g6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void write_trials_csv(std::ostream& out, const std::vector<TrialRecord>& records) {
  out << "n,algo,seed,queries,wall_ns,success,d,q_frac\n";
  for (const auto& r : records) {
    out << r.n << ',' << to_string(r.algo) << ',' << r.seed << ',' << r.queries << ','
        << r.wall_ns << ',' << (r.success ? 1 : 0) << ',';
    if (r.d) out << *r.d;
    out << ',';
    if (r.q_frac) out << format_g6(*r.q_frac);
    out << '\n';
  }
}

void write_scaling_csv(std::ostream& out, const std::vector<ScalingRow>& rows) {
  out << "n,algo,trials,mean_queries,stddev,mean_per_nlog2n,mean_per_nloglog2n\n";
  for (const auto& r : rows)
    out << r.n << ',' << to_string(r.algo) << ',' << r.trials << ',' << format_g6(r.mean_queries)
        << ',' << format_g6(r.stddev) << ',' << format_g6(r.per_n_log_n) << ','
        << format_g6(r.per_n_loglog_n) << '\n';
}

}  // namespace hiperm
