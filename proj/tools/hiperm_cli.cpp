// hiperm: solve, benchmark and audit permutation-Mastermind games.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "hiperm/adversary.hpp"
#include "hiperm/errors.hpp"
#include "hiperm/harness.hpp"
#include "hiperm/knowledge.hpp"
#include "hiperm/oracle.hpp"
#include "hiperm/solver_det.hpp"
#include "hiperm/solver_rand.hpp"
#include "hiperm/transcript.hpp"

using namespace hiperm;

namespace {

constexpr int kUsage = 2;

struct SolveOpts {
  std::string algo = "det";
  std::size_t n = 0;
  std::uint64_t seed = 1;
  std::string secret_file;
  std::string secret_dist = "uniform";
  std::string transcript_out;
  int d = 4;
  std::optional<double> q_frac;
  int c = 1;
};

struct BenchOpts {
  std::string algo = "det";
  std::vector<std::size_t> ns;
  std::size_t trials = 10;
  std::uint64_t master_seed = 1;
  std::string out;
  std::string table_out;
  std::size_t jobs = 0;
  int d = 4;
  std::optional<double> q_frac;
  int c = 1;
  std::string secret_dist = "uniform";
  bool deterministic = false;
  bool verify = false;
};

struct AuditOpts {
  std::string transcript;
  std::size_t n = 0;
  std::string secret_file;
};

SecretDist parse_dist(const std::string& s) {
  return s == "hard" ? SecretDist::hard : SecretDist::uniform;
}

void print_secret(const Secret& s) { write_secret(std::cout, s); }

int run_solve(const SolveOpts& o) {
  Secret secret;
  if (!o.secret_file.empty()) {
    secret = load_secret(o.secret_file);
    if (o.n != 0 && o.n != secret.z.size()) {
      std::cerr << "error: --n " << o.n << " disagrees with secret of length " << secret.z.size()
                << "\n";
      return kUsage;
    }
  } else {
    if (o.n == 0) {
      std::cerr << "error: --n or --secret-file is required\n";
      return kUsage;
    }
    RandomSource rng = RandomSource(o.seed).split(0);
    secret = generate(parse_dist(o.secret_dist), o.n, rng);
  }
  const std::size_t n = secret.z.size();

  SecretOracle oracle(secret);
  Transcript transcript;
  OracleHandle h = oracle.handle(&transcript);
  SolveResult r;
  if (o.algo == "det") {
    r = solve_det(h, n);
  } else {
    const LevelConfig cfg = LevelConfig::make(n, o.d, o.q_frac, o.c);
    r = solve_rand(h, n, cfg, RandomSource(o.seed).split(1));
  }
  if (!o.transcript_out.empty()) save_transcript(o.transcript_out, transcript);

  std::cout << "queries " << r.queries << "\n";
  if (o.algo == "det") std::cout << "bound " << det_query_bound(n) << "\n";
  print_secret(r.secret);
  if (!(r.secret == secret)) {
    std::cerr << "error: recovered secret differs from the oracle's secret\n";
    return 1;
  }
  return 0;
}

int run_bench_cmd(BenchOpts o) {
  BenchConfig cfg;
  cfg.algo = parse_algo(o.algo);
  cfg.ns = o.ns;
  cfg.trials = o.trials;
  cfg.master_seed = o.master_seed;
  if (o.jobs == 0) {
    if (const char* env = std::getenv("HIPERM_JOBS")) o.jobs = std::strtoull(env, nullptr, 10);
  }
  cfg.jobs = o.jobs == 0 ? std::max(1u, std::thread::hardware_concurrency()) : o.jobs;
  cfg.d = o.d;
  cfg.q_frac = o.q_frac;
  cfg.c = o.c;
  cfg.dist = parse_dist(o.secret_dist);
  cfg.record_time = !o.deterministic;
  cfg.verify_transcripts = o.verify;

  const auto records = run_bench(cfg);
  const auto rows = scaling_table(records);
  if (!o.out.empty()) {
    std::ofstream f(o.out);
    write_trials_csv(f, records);
  }
  if (!o.table_out.empty()) {
    std::ofstream f(o.table_out);
    write_scaling_csv(f, rows);
  }
  write_scaling_csv(std::cout, rows);

  std::size_t failed = 0;
  for (const auto& r : records) failed += r.success ? 0 : 1;
  if (failed) {
    std::cerr << failed << " trial(s) failed\n";
    return 1;
  }
  return 0;
}

int run_verify(const AuditOpts& o) {
  const Transcript t = load_transcript(o.transcript, o.n);
  std::optional<Secret> secret;
  if (!o.secret_file.empty()) secret = load_secret(o.secret_file);
  const VerifyReport rep = verify_transcript(t, secret ? &*secret : nullptr);
  std::cout << rep.to_json() << "\n";
  const bool ok = rep.feasible() && rep.replay_ok.value_or(true);
  return ok ? 0 : 1;
}

int run_count(const AuditOpts& o) {
  const Transcript t = load_transcript(o.transcript, o.n);
  const KnowledgeState k = KnowledgeState::from_history(t);
  std::cout << count_consistent(k).str() << "\n";
  return 0;
}

int run_adversary(std::size_t n, const std::string& transcript_out) {
  const ForcingResult r =
      play_adversary([](OracleHandle& h, std::size_t m) { return solve_det(h, m); }, n);
  if (!transcript_out.empty()) save_transcript(transcript_out, r.transcript);
  std::cout << "forced " << r.forced << "\n";
  std::cout << "total " << r.total << "\n";
  print_secret(r.committed);
  const VerifyReport rep = verify_transcript(r.transcript, &r.committed);
  if (!rep.replay_ok.value_or(false)) {
    std::cerr << "error: committed secret does not replay the transcript\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Query strategies and audit tools for permutation Mastermind"};
  app.require_subcommand(1);

  SolveOpts so;
  auto* solve = app.add_subcommand("solve", "Recover one secret");
  solve->add_option("--algo", so.algo)->check(CLI::IsMember({"det", "rand"}));
  solve->add_option("--n", so.n)->check(CLI::PositiveNumber);
  solve->add_option("--seed", so.seed);
  solve->add_option("--secret-file", so.secret_file)->check(CLI::ExistingFile);
  solve->add_option("--secret-dist", so.secret_dist)->check(CLI::IsMember({"uniform", "hard"}));
  solve->add_option("--transcript-out", so.transcript_out);
  solve->add_option("--d", so.d)->check(CLI::PositiveNumber);
  solve->add_option("--q-frac", so.q_frac)->check(CLI::Range(0.0, 1.0));
  solve->add_option("--c", so.c)->check(CLI::PositiveNumber);

  BenchOpts bo;
  auto* bench = app.add_subcommand("bench", "Run repeated trials and tabulate query counts");
  bench->add_option("--algo", bo.algo)->check(CLI::IsMember({"det", "rand", "adversary-det"}));
  bench->add_option("--n-list", bo.ns)->delimiter(',')->required();
  bench->add_option("--trials", bo.trials);
  bench->add_option("--master-seed", bo.master_seed);
  bench->add_option("--out", bo.out, "trial CSV");
  bench->add_option("--table-out", bo.table_out, "scaling table CSV");
  bench->add_option("--jobs", bo.jobs, "worker threads (default: $HIPERM_JOBS, else all cores)");
  bench->add_option("--d", bo.d)->check(CLI::PositiveNumber);
  bench->add_option("--q-frac", bo.q_frac)->check(CLI::Range(0.0, 1.0));
  bench->add_option("--c", bo.c)->check(CLI::PositiveNumber);
  bench->add_option("--secret-dist", bo.secret_dist)->check(CLI::IsMember({"uniform", "hard"}));
  bench->add_flag("--deterministic", bo.deterministic, "write wall_ns as 0");
  bench->add_flag("--verify", bo.verify, "keep and verify every transcript");

  AuditOpts vo;
  auto* verify = app.add_subcommand("verify", "Check a transcript for consistency");
  verify->add_option("transcript", vo.transcript)->required()->check(CLI::ExistingFile);
  verify->add_option("--n", vo.n, "length, needed for an empty transcript");
  verify->add_option("--secret-file", vo.secret_file)->check(CLI::ExistingFile);

  AuditOpts co;
  auto* count = app.add_subcommand("count", "Count secrets consistent with a transcript");
  count->add_option("transcript", co.transcript)->required()->check(CLI::ExistingFile);
  count->add_option("--n", co.n, "length, needed for an empty transcript");

  std::size_t adv_n = 0;
  std::string adv_out;
  auto* adversary = app.add_subcommand("adversary", "Play the deterministic solver against the adversary");
  adversary->add_option("--n", adv_n)->required()->check(CLI::Range(2, 1 << 20));
  adversary->add_option("--transcript-out", adv_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*solve) return run_solve(so);
    if (*bench) return run_bench_cmd(bo);
    if (*verify) return run_verify(vo);
    if (*count) return run_count(co);
    if (*adversary) return run_adversary(adv_n, adv_out);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kUsage;
  } catch (const DimensionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
