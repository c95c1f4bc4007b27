#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ghzsim/analytics.hpp"
#include "ghzsim/noise.hpp"
#include "ghzsim/rng.hpp"
#include "ghzsim/sparse_state.hpp"

namespace ghzsim {

enum class Scheme {
  kBasic,     // build all n links, then herald every ensemble at once
  kImproved,  // merge pairs level by level, then close the ring
};

enum class EngineKind {
  kMicroscopic,  // full state-vector trajectories with sampled loss
  kAbstract,     // Bernoulli outcomes at the analytic step rates
};

enum class PhaseMode { kZero, kRandom, kMirrored };

enum class RestartMode {
  kRestartAll,  // failed merge discards both sub-blocks
  kLocalRetry,  // failed merge keeps the left sub-block (abstract only)
};

struct ProtocolConfig {
  int n = 4;
  NoiseParams noise;
  PrepParams prep;
  Scheme scheme = Scheme::kImproved;
  EngineKind engine = EngineKind::kMicroscopic;
  PhaseMode phase_mode = PhaseMode::kZero;
  RestartMode restart = RestartMode::kRestartAll;
  bool parallel_prep = true;
  /// Ceiling on source pulses per trial before the trial is abandoned.
  uint64_t attempt_cap = 10'000'000;
};

/// Throws ConfigError for invalid parameter combinations and GuardError for
/// sizes the requested engine cannot handle.
void validate(const ProtocolConfig& cfg);

enum class TrialStatus { kSuccess, kAbortedCap };

struct StepCount {
  uint64_t attempts = 0;
  uint64_t successes = 0;
};

struct TrialRecord {
  TrialStatus status = TrialStatus::kSuccess;
  /// Wall-clock model: every merge attempt waits on the slower of the
  /// steady sub-block supply (its mean build time) and its own link pair.
  double wall_s = 0.0;
  /// Stricter accounting where each attempt waits for both freshly built
  /// sub-blocks; reported for comparison, never part of wall_s.
  double parallel_max_wall_s = 0.0;
  uint64_t pair_preps = 0;
  uint64_t elementary_attempts = 0;  // source pulses
  /// Per protocol step ("connect-L1", "closure", "chain-round", ...).
  std::map<std::string, StepCount> step_attempts;
  /// Recorded detector bit per ensemble (0 = h), in ensemble order.
  /// Empty for the abstract engine.
  std::vector<int> bits;
  bool has_bits() const { return !bits.empty(); }
  /// True when an even number of v-side detectors fired. Vacuously true
  /// without bits.
  bool even_parity() const;
};

/// Link phases for links (i, i+1 mod n), i = 1..n. kMirrored draws the
/// first half and negates it into the second half so the total vanishes;
/// it requires even n.
std::vector<double> assign_phases(int n, PhaseMode mode, TrialRng& rng);

struct PairPrep {
  uint64_t pulses = 0;
  double elapsed_s = 0.0;
};

/// Samples the heralding cost of one pair: geometric(p0) pulses at f_p.
PairPrep sample_pair_prep(const PrepParams& prep, TrialRng& rng);

/// Product of all n ring links (i, next(i)) before any loss.
SparseState ring_state(int n, const std::vector<double>& link_phases);

struct RoundResult {
  bool accepted = false;
  std::vector<int> bits;
};

/// One heralding round of the basic scheme on a prebuilt ring state:
/// sampled loss, balanced-basis detection on every ensemble, accepted when
/// each ensemble yields exactly one click.
RoundResult run_basic_round(const SparseState& ring, int n, double eta, TrialRng& rng);

TrialRecord run_basic_trial(const ProtocolConfig& cfg, const std::vector<double>& phases,
                            TrialRng& rng);
TrialRecord run_improved_trial(const ProtocolConfig& cfg, const std::vector<double>& phases,
                               TrialRng& rng);

/// Dispatches on cfg.scheme after validate(cfg).
TrialRecord run_trial(const ProtocolConfig& cfg, const std::vector<double>& phases, TrialRng& rng);

}  // namespace ghzsim
