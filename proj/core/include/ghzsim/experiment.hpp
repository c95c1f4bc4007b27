#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ghzsim/protocol.hpp"

namespace ghzsim {

/// A batch of independent trials of one protocol configuration.
/// `workers` only distributes work; it is deliberately absent from the
/// report so identical runs produce identical bytes at any thread count.
struct RunConfig {
  ProtocolConfig protocol;
  uint64_t trials = 1000;
  uint64_t seed = 12345;
  int workers = 1;
};

struct StepSummary {
  std::string name;
  uint64_t attempts = 0;
  uint64_t successes = 0;
  double empirical = 0.0;
  double std_err = 0.0;
  double analytic = 0.0;
};

struct RunReport {
  RunConfig config;
  std::vector<double> link_phases;
  double total_phase = 0.0;

  uint64_t successes = 0;
  uint64_t aborted_cap = 0;
  double wall_mean_s = 0.0;
  double wall_median_s = 0.0;
  double parallel_max_wall_mean_s = 0.0;
  double pair_preps_mean = 0.0;
  double elementary_mean = 0.0;
  std::vector<StepSummary> steps;

  uint64_t trials_with_bits = 0;
  uint64_t even_parity_count = 0;

  std::vector<std::string> notes;
};

/// Runs cfg.trials independent trials (trial k uses random stream k of
/// cfg.seed; the shared link-phase draw uses a reserved stream), fanned out
/// over cfg.workers threads, and aggregates in trial order. Throws
/// GuardError if every trial hit the pulse cap.
RunReport run_experiment(const RunConfig& cfg);

/// Deterministic JSON rendering of the report: configuration echo, the
/// closed-form expectations for this configuration, empirical aggregates
/// with per-step rate comparisons, and any notes. Contains no timestamps,
/// host details, or thread counts.
std::string report_json(const RunReport& report, int indent = 2);

/// Small exactly-solvable scenarios for cross-checking the simulator
/// against the closed forms: "pair", "step1", or "ladder".
struct OracleRequest {
  std::string scenario = "step1";
  int n = 4;
  double eta = 0.0;
  PhaseMode phases = PhaseMode::kZero;
  uint64_t seed = 12345;
};

std::string run_oracle_json(const OracleRequest& request, int indent = 2);

}  // namespace ghzsim
