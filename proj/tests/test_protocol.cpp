#include <cmath>
#include <complex>
#include <numeric>

#include "doctest.h"
#include "ghzsim/analytics.hpp"
#include "ghzsim/errors.hpp"
#include "ghzsim/protocol.hpp"
#include "ghzsim/sparse_state.hpp"
#include "oracle_utils.hpp"

using namespace ghzsim;

namespace {

constexpr double kTwoPi = 6.28318530717958647692;

ProtocolConfig improved_micro(int n, double eta) {
  ProtocolConfig cfg;
  cfg.n = n;
  cfg.noise.eta = eta;
  cfg.scheme = Scheme::kImproved;
  cfg.engine = EngineKind::kMicroscopic;
  return cfg;
}

}  // namespace

TEST_CASE("phase assignment modes") {
  TrialRng rng(31, 0);

  auto zero = assign_phases(6, PhaseMode::kZero, rng);
  CHECK(zero == std::vector<double>(6, 0.0));

  auto random = assign_phases(6, PhaseMode::kRandom, rng);
  REQUIRE(random.size() == 6);
  for (double phi : random) {
    CHECK(phi >= 0.0);
    CHECK(phi < kTwoPi);
  }

  auto mirrored = assign_phases(6, PhaseMode::kMirrored, rng);
  REQUIRE(mirrored.size() == 6);
  for (int i = 0; i < 3; ++i) CHECK(mirrored[i] == -mirrored[5 - i]);
  CHECK(std::abs(std::accumulate(mirrored.begin(), mirrored.end(), 0.0)) < 1e-12);

  CHECK_THROWS_AS(assign_phases(5, PhaseMode::kMirrored, rng), ConfigError);
}

TEST_CASE("pair preparation cost is geometric") {
  PrepParams prep;  // p0 = 0.01, f_p = 1e7
  TrialRng rng(8, 8);
  const int trials = 20000;
  double pulses = 0.0;
  for (int i = 0; i < trials; ++i) {
    PairPrep prep_result = sample_pair_prep(prep, rng);
    CHECK(prep_result.elapsed_s == prep_result.pulses / prep.f_p);
    pulses += static_cast<double>(prep_result.pulses);
  }
  double mean = pulses / trials;
  double sd = std::sqrt((1.0 - prep.p0) / (prep.p0 * prep.p0) / trials);
  CHECK(std::abs(mean - 1.0 / prep.p0) < 4.0 * sd);
}

TEST_CASE("ring state equals the explicit link expansion") {
  const int n = 3;
  std::vector<double> phases{0.4, 1.1, 5.0};
  SparseState ring = ring_state(n, phases);
  CHECK(ring.term_count() == 8);
  CHECK(ring.norm_sq() == doctest::Approx(1.0).epsilon(1e-12));

  // Each link i contributes h_i or e^{i phi_i} v_{i+1}; enumerate all 2^n
  // choices and assemble keys and amplitudes by hand.
  SparseState want(2 * n);
  const double amp0 = std::pow(1.0 / std::sqrt(2.0), n);
  for (int mask = 0; mask < (1 << n); ++mask) {
    OccupationKey key(2 * n, 0);
    double phase = 0.0;
    for (int link = 1; link <= n; ++link) {
      if (mask & (1 << (link - 1))) {
        key[flat_mode_index(mode_v(next_ensemble(link, n)))] += 1;
        phase += phases[link - 1];
      } else {
        key[flat_mode_index(mode_h(link))] += 1;
      }
    }
    want.accumulate(key, std::polar(amp0, phase));
  }
  REQUIRE(want.term_count() == ring.term_count());
  for (const auto& [key, amp] : want.terms()) CHECK(std::abs(ring.amplitude(key) - amp) < 1e-13);
}

TEST_CASE("configuration validation") {
  ProtocolConfig cfg;

  SUBCASE("eta range") {
    cfg.noise.eta = 1.0;
    CHECK_THROWS_AS(validate(cfg), ConfigError);
    cfg.noise.eta = -0.1;
    CHECK_THROWS_AS(validate(cfg), ConfigError);
  }
  SUBCASE("prep parameters") {
    cfg.prep.p0 = 0.0;
    CHECK_THROWS_AS(validate(cfg), ConfigError);
    cfg.prep.p0 = 0.01;
    cfg.prep.f_p = 0.0;
    CHECK_THROWS_AS(validate(cfg), ConfigError);
  }
  SUBCASE("improved scheme needs a power-of-two ring") {
    cfg.n = 6;
    CHECK_THROWS_AS(validate(cfg), ConfigError);
    cfg.n = 2;
    CHECK_THROWS_AS(validate(cfg), ConfigError);
  }
  SUBCASE("microscopic engine size guard") {
    cfg.n = 16;
    CHECK_THROWS_AS(validate(cfg), GuardError);
    cfg.engine = EngineKind::kAbstract;
    CHECK_NOTHROW(validate(cfg));
    cfg.n = 128;
    CHECK_THROWS_AS(validate(cfg), GuardError);
  }
  SUBCASE("local retry is abstract-only and improved-only") {
    cfg.restart = RestartMode::kLocalRetry;
    CHECK_THROWS_AS(validate(cfg), ConfigError);
    cfg.engine = EngineKind::kAbstract;
    CHECK_NOTHROW(validate(cfg));
    cfg.scheme = Scheme::kBasic;
    CHECK_THROWS_AS(validate(cfg), ConfigError);
  }
  SUBCASE("basic scheme takes any n >= 2") {
    cfg.scheme = Scheme::kBasic;
    cfg.n = 3;
    CHECK_NOTHROW(validate(cfg));
    cfg.n = 1;
    CHECK_THROWS_AS(validate(cfg), ConfigError);
  }
  SUBCASE("attempt cap must be positive") {
    cfg.attempt_cap = 0;
    CHECK_THROWS_AS(validate(cfg), ConfigError);
  }
}

TEST_CASE("basic round acceptance and parity") {
  const int n = 4;
  for (double eta : {0.0, 0.2}) {
    std::vector<double> phases(n, 0.0);
    SparseState ring = ring_state(n, phases);
    TrialRng rng(555, static_cast<uint64_t>(eta * 100));
    const int rounds = 10000;
    uint64_t accepted = 0;
    for (int i = 0; i < rounds; ++i) {
      RoundResult r = run_basic_round(ring, n, eta, rng);
      if (!r.accepted) continue;
      accepted += 1;
      REQUIRE(r.bits.size() == n);
      int v_clicks = std::accumulate(r.bits.begin(), r.bits.end(), 0);
      CHECK(v_clicks % 2 == 0);
    }
    CHECK(oracle::within_sigma(accepted, rounds, analytics::basic_acceptance(n, eta), 4.0));
  }
}

TEST_CASE("basic trial bookkeeping") {
  ProtocolConfig cfg;
  cfg.n = 4;
  cfg.noise.eta = 0.1;
  cfg.scheme = Scheme::kBasic;
  std::vector<double> phases(4, 0.0);

  SUBCASE("microscopic, parallel preparation") {
    TrialRng rng(90, 1);
    TrialRecord rec = run_trial(cfg, phases, rng);
    CHECK(rec.status == TrialStatus::kSuccess);
    REQUIRE(rec.has_bits());
    CHECK(rec.bits.size() == 4);
    CHECK(rec.even_parity());
    const StepCount& rounds = rec.step_attempts.at("chain-round");
    CHECK(rounds.successes == 1);
    CHECK(rec.pair_preps == 4 * rounds.attempts);
    CHECK(rec.wall_s == rec.parallel_max_wall_s);
    CHECK(rec.elementary_attempts >= rec.pair_preps);
  }

  SUBCASE("deterministic per stream") {
    TrialRng a(90, 2), b(90, 2);
    TrialRecord ra = run_trial(cfg, phases, a);
    TrialRecord rb = run_trial(cfg, phases, b);
    CHECK(ra.wall_s == rb.wall_s);
    CHECK(ra.bits == rb.bits);
    CHECK(ra.pair_preps == rb.pair_preps);
  }

  SUBCASE("serial preparation sums every pair, parallel waits on the slowest") {
    // The flag only changes the wall accounting, so identical streams give
    // identical samples and the two clocks are directly comparable.
    TrialRng a(91, 3), b(91, 3);
    cfg.parallel_prep = false;
    TrialRecord serial = run_trial(cfg, phases, a);
    cfg.parallel_prep = true;
    TrialRecord parallel = run_trial(cfg, phases, b);
    CHECK(parallel.step_attempts.at("chain-round").attempts ==
          serial.step_attempts.at("chain-round").attempts);
    CHECK(parallel.elementary_attempts == serial.elementary_attempts);
    CHECK(parallel.bits == serial.bits);
    // Serial wall clock is the total pulse count over the pulse rate.
    CHECK(serial.wall_s ==
          doctest::Approx(serial.elementary_attempts / cfg.prep.f_p));
    // Per round, max over the n pairs lies between sum/n and sum.
    CHECK(parallel.wall_s <= serial.wall_s);
    CHECK(parallel.wall_s >= serial.wall_s / 4.0);
  }

  SUBCASE("abstract engine records no bits") {
    cfg.engine = EngineKind::kAbstract;
    TrialRng rng(92, 4);
    TrialRecord rec = run_trial(cfg, phases, rng);
    CHECK(rec.status == TrialStatus::kSuccess);
    CHECK_FALSE(rec.has_bits());
    CHECK(rec.even_parity());  // vacuously
    CHECK(rec.step_attempts.at("chain-round").successes == 1);
  }
}

TEST_CASE("improved trial structure") {
  std::vector<double> phases(8, 0.0);

  SUBCASE("microscopic n = 8 records one bit per ensemble") {
    ProtocolConfig cfg = improved_micro(8, 1.0 / 3.0);
    TrialRng rng(7, 0);
    TrialRecord rec = run_trial(cfg, phases, rng);
    CHECK(rec.status == TrialStatus::kSuccess);
    REQUIRE(rec.bits.size() == 8);
    CHECK(rec.even_parity());
    CHECK(rec.step_attempts.count("connect-L1") == 1);
    CHECK(rec.step_attempts.count("connect-L2") == 1);
    CHECK(rec.step_attempts.count("closure") == 1);
    CHECK(rec.step_attempts.at("closure").successes == 1);
    CHECK(rec.wall_s > 0.0);
    CHECK(rec.parallel_max_wall_s > 0.0);
    CHECK(rec.elementary_attempts >= rec.pair_preps);
  }

  SUBCASE("abstract restart modes both deliver") {
    ProtocolConfig cfg = improved_micro(8, 0.2);
    cfg.engine = EngineKind::kAbstract;
    for (RestartMode mode : {RestartMode::kRestartAll, RestartMode::kLocalRetry}) {
      cfg.restart = mode;
      TrialRng rng(13, 5);
      TrialRecord rec = run_trial(cfg, phases, rng);
      CHECK(rec.status == TrialStatus::kSuccess);
      CHECK(rec.step_attempts.at("closure").successes == 1);
      CHECK_FALSE(rec.has_bits());
    }
  }

  SUBCASE("pulse cap aborts the trial") {
    ProtocolConfig cfg = improved_micro(8, 0.5);
    cfg.attempt_cap = 50;
    TrialRng rng(1, 1);
    TrialRecord rec = run_trial(cfg, phases, rng);
    CHECK(rec.status == TrialStatus::kAbortedCap);
    CHECK(rec.elementary_attempts >= cfg.attempt_cap);
  }

  SUBCASE("phase vector must match n") {
    ProtocolConfig cfg = improved_micro(4, 0.0);
    TrialRng rng(2, 2);
    CHECK_THROWS_AS(run_trial(cfg, phases, rng), std::invalid_argument);
  }
}

TEST_CASE("improved microscopic parity survives loss and phases") {
  ProtocolConfig cfg = improved_micro(4, 0.3);
  cfg.phase_mode = PhaseMode::kMirrored;
  TrialRng phase_rng(404, 0);
  auto phases = assign_phases(4, PhaseMode::kMirrored, phase_rng);
  for (uint64_t k = 0; k < 200; ++k) {
    TrialRng rng(404, k + 1);
    TrialRecord rec = run_trial(cfg, phases, rng);
    REQUIRE(rec.status == TrialStatus::kSuccess);
    CHECK(rec.even_parity());
  }
}
