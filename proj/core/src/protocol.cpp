#include "ghzsim/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ghzsim/errors.hpp"
#include "ghzsim/exact_ladder.hpp"
#include "ghzsim/measurement.hpp"

namespace ghzsim {

namespace {

constexpr double kTwoPi = 6.2831853071795864769;

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// Internal unwind when a trial exhausts its pulse budget mid-build.
struct CapReached {};

struct TrialCtx {
  const ProtocolConfig& cfg;
  const std::vector<double>& phases;
  TrialRng& rng;
  TrialRecord& record;

  PairPrep prep_pair() {
    PairPrep pp = sample_pair_prep(cfg.prep, rng);
    record.pair_preps += 1;
    record.elementary_attempts += pp.pulses;
    if (record.elementary_attempts > cfg.attempt_cap) throw CapReached{};
    return pp;
  }

  StepCount& step(const std::string& key) { return record.step_attempts[key]; }
};

struct BlockBuild {
  SparseState state;   // microscopic engine only
  double charged_s = 0.0;
  double faithful_s = 0.0;
};

std::string connect_key(int level) { return "connect-L" + std::to_string(level); }

// Merge ladder over sampled trajectories. Blocks span ensembles [lo..hi];
// merging [lo..mid] with [mid+1..hi] prepares the (mid, mid+1) link and
// heralds single occupancy on both of those ensembles. A v-side click
// flips the sign between the surviving h- and v-chains, which is undone on
// the block's right boundary; the flip is folded back into that ensemble's
// recorded bit when it is eventually measured.
class MicroLadder {
 public:
  MicroLadder(TrialCtx& ctx, const std::vector<double>& d_level)
      : ctx_(ctx),
        n_(ctx.cfg.n),
        eta_(ctx.cfg.noise.eta),
        d_level_(d_level),
        frame_flips_(static_cast<size_t>(ctx.cfg.n) + 1, 0),
        bits_(static_cast<size_t>(ctx.cfg.n), -1) {}

  TrialRecord& record() { return ctx_.record; }

  BlockBuild build_block(int lo, int hi, int level) {
    if (level == 0) {
      // A fresh pair starts with no pending frame correction; stale flips
      // from a discarded build of this span die here.
      frame_flips_[size_t(lo)] = 0;
      frame_flips_[size_t(hi)] = 0;
      PairPrep pp = ctx_.prep_pair();
      return BlockBuild{exact::pair_state(n_, lo, hi, ctx_.phases[size_t(lo - 1)]), pp.elapsed_s,
                        pp.elapsed_s};
    }
    int mid = lo + (hi - lo) / 2;
    double charged = 0.0;
    double faithful = 0.0;
    for (;;) {
      BlockBuild a = build_block(lo, mid, level - 1);
      BlockBuild b = build_block(mid + 1, hi, level - 1);
      PairPrep link_pp = ctx_.prep_pair();
      charged += std::max(d_level_[size_t(level - 1)], link_pp.elapsed_s);
      faithful += std::max({a.faithful_s, b.faithful_s, link_pp.elapsed_s});
      SparseState link = exact::pair_state(n_, mid, mid + 1, ctx_.phases[size_t(mid - 1)]);
      SparseState joint = mode_product(mode_product(a.state, link), b.state);

      auto& step = ctx_.step(connect_key(level));
      step.attempts += 1;
      auto [click_lo, after_lo] = detect_ensemble_sample(joint, mid, eta_, RotationSpec{}, ctx_.rng);
      if (!click_lo.accepted()) continue;
      auto [click_hi, after_hi] =
          detect_ensemble_sample(after_lo, mid + 1, eta_, RotationSpec{}, ctx_.rng);
      if (!click_hi.accepted()) continue;
      step.successes += 1;

      record_bit(mid, click_lo.bit());
      record_bit(mid + 1, click_hi.bit());
      SparseState merged = std::move(after_hi);
      if ((click_lo.bit() + click_hi.bit()) % 2 == 1) {
        merged = phase_flip_v(merged, hi);
        frame_flips_[size_t(hi)] ^= 1;
      }
      return BlockBuild{std::move(merged), charged, faithful};
    }
  }

  void run(int levels) {
    for (;;) {
      BlockBuild top = build_block(1, n_, levels);
      PairPrep link_pp = ctx_.prep_pair();
      ctx_.record.wall_s += std::max(top.charged_s, link_pp.elapsed_s);
      ctx_.record.parallel_max_wall_s += std::max(top.faithful_s, link_pp.elapsed_s);
      SparseState link = exact::pair_state(n_, n_, 1, ctx_.phases[size_t(n_ - 1)]);
      SparseState joint = mode_product(top.state, link);

      auto& step = ctx_.step("closure");
      step.attempts += 1;
      auto [click_n, after_n] = detect_ensemble_sample(joint, n_, eta_, RotationSpec{}, ctx_.rng);
      if (!click_n.accepted()) continue;
      auto [click_1, after_1] =
          detect_ensemble_sample(after_n, 1, eta_, RotationSpec{}, ctx_.rng);
      if (!click_1.accepted()) continue;
      step.successes += 1;
      record_bit(n_, click_n.bit());
      record_bit(1, click_1.bit());
      ctx_.record.bits = bits_;
      return;
    }
  }

 private:
  void record_bit(int ensemble, int physical_bit) {
    bits_[size_t(ensemble - 1)] = physical_bit ^ frame_flips_[size_t(ensemble)];
  }

  TrialCtx& ctx_;
  int n_;
  double eta_;
  const std::vector<double>& d_level_;
  std::vector<int> frame_flips_;
  std::vector<int> bits_;
};

// Same ladder with Bernoulli step outcomes at the analytic rates; no
// states, no bits. Supports the keep-left retry policy.
class AbstractLadder {
 public:
  AbstractLadder(TrialCtx& ctx, const std::vector<double>& d_level,
                 const std::vector<double>& p_level, double p_close)
      : ctx_(ctx), d_level_(d_level), p_level_(p_level), p_close_(p_close) {}

  BlockBuild build_block(int level) {
    if (level == 0) {
      PairPrep pp = ctx_.prep_pair();
      return BlockBuild{SparseState(0), pp.elapsed_s, pp.elapsed_s};
    }
    double charged = 0.0;
    double faithful = 0.0;
    BlockBuild a = build_block(level - 1);
    BlockBuild b = build_block(level - 1);
    for (;;) {
      PairPrep link_pp = ctx_.prep_pair();
      charged += std::max(d_level_[size_t(level - 1)], link_pp.elapsed_s);
      faithful += std::max({a.faithful_s, b.faithful_s, link_pp.elapsed_s});
      auto& step = ctx_.step(connect_key(level));
      step.attempts += 1;
      if (ctx_.rng.bernoulli(p_level_[size_t(level - 1)])) {
        step.successes += 1;
        return BlockBuild{SparseState(0), charged, faithful};
      }
      if (ctx_.cfg.restart == RestartMode::kRestartAll) {
        a = build_block(level - 1);
        b = build_block(level - 1);
      } else {
        b = build_block(level - 1);
        a.faithful_s = 0.0;  // already in hand while the new right block builds
      }
    }
  }

  void run(int levels) {
    for (;;) {
      BlockBuild top = build_block(levels);
      PairPrep link_pp = ctx_.prep_pair();
      ctx_.record.wall_s += std::max(top.charged_s, link_pp.elapsed_s);
      ctx_.record.parallel_max_wall_s += std::max(top.faithful_s, link_pp.elapsed_s);
      auto& step = ctx_.step("closure");
      step.attempts += 1;
      if (ctx_.rng.bernoulli(p_close_)) {
        step.successes += 1;
        return;
      }
    }
  }

 private:
  TrialCtx& ctx_;
  const std::vector<double>& d_level_;
  const std::vector<double>& p_level_;
  double p_close_;
};

}  // namespace

void validate(const ProtocolConfig& cfg) {
  if (!(cfg.noise.eta >= 0.0 && cfg.noise.eta < 1.0)) throw ConfigError("eta must lie in [0, 1)");
  if (!(cfg.prep.p0 > 0.0 && cfg.prep.p0 < 1.0)) throw ConfigError("p0 must lie in (0, 1)");
  if (!(cfg.prep.f_p > 0.0)) throw ConfigError("f_p must be positive");
  if (cfg.attempt_cap == 0) throw ConfigError("attempt cap must be positive");
  if (cfg.scheme == Scheme::kBasic) {
    if (cfg.n < 2) throw ConfigError("ring scheme requires n >= 2");
    if (cfg.restart == RestartMode::kLocalRetry)
      throw ConfigError("local retry applies only to the merging scheme");
  } else {
    if (!is_power_of_two(cfg.n) || cfg.n < 4)
      throw ConfigError("ring merging requires n a power of two with n >= 4");
    if (cfg.restart == RestartMode::kLocalRetry && cfg.engine == EngineKind::kMicroscopic)
      throw ConfigError("local retry is bookkeeping-only and needs the abstract engine");
  }
  if (cfg.engine == EngineKind::kMicroscopic && cfg.n > 10)
    throw GuardError("microscopic engine is limited to n <= 10");
  if (cfg.engine == EngineKind::kAbstract && cfg.n > 64)
    throw GuardError("abstract engine is limited to n <= 64");
}

bool TrialRecord::even_parity() const {
  int sum = 0;
  for (int b : bits) sum += b;
  return sum % 2 == 0;
}

std::vector<double> assign_phases(int n, PhaseMode mode, TrialRng& rng) {
  if (n < 2) throw ConfigError("phase assignment requires n >= 2");
  std::vector<double> phases(static_cast<size_t>(n), 0.0);
  switch (mode) {
    case PhaseMode::kZero:
      break;
    case PhaseMode::kRandom:
      for (double& phi : phases) phi = kTwoPi * rng.uniform();
      break;
    case PhaseMode::kMirrored: {
      if (n % 2 != 0) throw ConfigError("mirrored phases require even n");
      for (int i = 1; i <= n / 2; ++i) {
        double phi = kTwoPi * rng.uniform();
        phases[size_t(i - 1)] = phi;
        phases[size_t(n - i)] = -phi;
      }
      break;
    }
  }
  return phases;
}

PairPrep sample_pair_prep(const PrepParams& prep, TrialRng& rng) {
  uint64_t pulses = rng.geometric(prep.p0);
  return PairPrep{pulses, double(pulses) / prep.f_p};
}

SparseState ring_state(int n, const std::vector<double>& link_phases) {
  if (link_phases.size() != static_cast<size_t>(n))
    throw std::invalid_argument("ring_state: need one phase per link");
  SparseState state = exact::pair_state(n, 1, next_ensemble(1, n), link_phases[0]);
  for (int i = 2; i <= n; ++i)
    state = mode_product(state, exact::pair_state(n, i, next_ensemble(i, n),
                                                  link_phases[size_t(i - 1)]));
  return state;
}

RoundResult run_basic_round(const SparseState& ring, int n, double eta, TrialRng& rng) {
  RoundResult result;
  result.bits.assign(static_cast<size_t>(n), -1);
  SparseState state = ring;
  for (int e = 1; e <= n; ++e) {
    auto [click, collapsed] = detect_ensemble_sample(state, e, eta, RotationSpec{}, rng);
    if (!click.accepted()) return result;
    result.bits[size_t(e - 1)] = click.bit();
    state = std::move(collapsed);
  }
  result.accepted = true;
  return result;
}

TrialRecord run_basic_trial(const ProtocolConfig& cfg, const std::vector<double>& phases,
                            TrialRng& rng) {
  TrialRecord record;
  TrialCtx ctx{cfg, phases, rng, record};
  bool micro = cfg.engine == EngineKind::kMicroscopic;
  SparseState ring(0);
  if (micro) ring = ring_state(cfg.n, phases);
  double accept_rate =
      micro ? 0.0 : analytics::basic_acceptance(cfg.n, cfg.noise.eta);
  try {
    for (;;) {
      double round_max = 0.0;
      double round_sum = 0.0;
      for (int i = 0; i < cfg.n; ++i) {
        PairPrep pp = ctx.prep_pair();
        round_max = std::max(round_max, pp.elapsed_s);
        round_sum += pp.elapsed_s;
      }
      double round_s = cfg.parallel_prep ? round_max : round_sum;
      record.wall_s += round_s;
      record.parallel_max_wall_s += round_s;
      auto& step = ctx.step("chain-round");
      step.attempts += 1;
      if (micro) {
        RoundResult rr = run_basic_round(ring, cfg.n, cfg.noise.eta, rng);
        if (rr.accepted) {
          step.successes += 1;
          record.bits = std::move(rr.bits);
          return record;
        }
      } else if (rng.bernoulli(accept_rate)) {
        step.successes += 1;
        return record;
      }
    }
  } catch (const CapReached&) {
    record.status = TrialStatus::kAbortedCap;
    return record;
  }
}

TrialRecord run_improved_trial(const ProtocolConfig& cfg, const std::vector<double>& phases,
                               TrialRng& rng) {
  int levels = analytics::ladder_levels(cfg.n);
  std::vector<double> d_level;
  for (int i = 0; i < levels; ++i)
    d_level.push_back(analytics::modeled_block_time_s(i, cfg.noise.eta, cfg.prep));

  TrialRecord record;
  TrialCtx ctx{cfg, phases, rng, record};
  try {
    if (cfg.engine == EngineKind::kMicroscopic) {
      MicroLadder ladder(ctx, d_level);
      ladder.run(levels);
    } else {
      std::vector<double> p_level;
      for (int i = 1; i <= levels; ++i)
        p_level.push_back(analytics::connect_success(i, cfg.noise.eta));
      AbstractLadder ladder(ctx, d_level, p_level,
                            analytics::close_success(levels, cfg.noise.eta));
      ladder.run(levels);
    }
  } catch (const CapReached&) {
    record.status = TrialStatus::kAbortedCap;
  }
  return record;
}

TrialRecord run_trial(const ProtocolConfig& cfg, const std::vector<double>& phases, TrialRng& rng) {
  validate(cfg);
  if (phases.size() != static_cast<size_t>(cfg.n))
    throw std::invalid_argument("run_trial: need one phase per link");
  return cfg.scheme == Scheme::kBasic ? run_basic_trial(cfg, phases, rng)
                                      : run_improved_trial(cfg, phases, rng);
}

}  // namespace ghzsim
