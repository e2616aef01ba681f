#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hiperm/oracle.hpp"

namespace hiperm {

enum class Algo { det, rand, adversary_det };

std::string to_string(Algo a);
/// "det", "rand" or "adversary-det"; throws std::invalid_argument otherwise.
Algo parse_algo(const std::string& s);

struct TrialRecord {
  std::size_t n = 0;
  Algo algo = Algo::det;
  std::uint64_t seed = 0;
  std::size_t queries = 0;
  std::uint64_t wall_ns = 0;
  bool success = false;
  std::optional<int> d;          // rand only
  std::optional<double> q_frac;  // rand only
};

struct ScalingRow {
  std::size_t n = 0;
  Algo algo = Algo::det;
  std::size_t trials = 0;
  double mean_queries = 0;
  double stddev = 0;
  double per_n_log_n = 0;
  double per_n_loglog_n = 0;
};

struct BenchConfig {
  Algo algo = Algo::det;
  std::vector<std::size_t> ns;
  std::size_t trials = 10;
  std::uint64_t master_seed = 1;
  std::size_t jobs = 1;
  int d = 4;
  std::optional<double> q_frac;
  int c = 1;
  SecretDist dist = SecretDist::uniform;
  /// Write wall_ns = 0 so the trial CSV is a pure function of the inputs.
  bool record_time = true;
  /// Keep each transcript and require verify_transcript to report a unique,
  /// replaying history for success.
  bool verify_transcripts = false;
};

/// Seed of trial number `trial` at size n, derived from the master seed only.
std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t n, std::size_t trial);

TrialRecord run_trial(const BenchConfig& cfg, std::size_t n, std::uint64_t seed);

/// Runs cfg.trials trials per n on cfg.jobs threads. Records come back in
/// (n, trial) order regardless of scheduling.
std::vector<TrialRecord> run_bench(const BenchConfig& cfg);

/// Groups by (n, algo) in order of first appearance.
std::vector<ScalingRow> scaling_table(const std::vector<TrialRecord>& records);

void write_trials_csv(std::ostream& out, const std::vector<TrialRecord>& records);
void write_scaling_csv(std::ostream& out, const std::vector<ScalingRow>& rows);

/// printf("%.6g").
std::string format_g6(double v);

}  // namespace hiperm
