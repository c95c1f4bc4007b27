#include <cmath>
#include <string>

#include "doctest.h"
#include "ghzsim/analytics.hpp"
#include "ghzsim/errors.hpp"
#include "ghzsim/experiment.hpp"
#include "oracle_utils.hpp"

#include "json.hpp"

using namespace ghzsim;
using nlohmann::json;

namespace {

RunConfig micro_run(int n, double eta, uint64_t trials, uint64_t seed) {
  RunConfig rc;
  rc.protocol.n = n;
  rc.protocol.noise.eta = eta;
  rc.protocol.scheme = Scheme::kImproved;
  rc.protocol.engine = EngineKind::kMicroscopic;
  rc.trials = trials;
  rc.seed = seed;
  return rc;
}

}  // namespace

TEST_CASE("report bytes do not depend on worker count or repetition") {
  RunConfig rc = micro_run(4, 1.0 / 3.0, 300, 2026);
  rc.protocol.phase_mode = PhaseMode::kRandom;

  rc.workers = 1;
  std::string one = report_json(run_experiment(rc));
  std::string one_again = report_json(run_experiment(rc));
  rc.workers = 4;
  std::string four = report_json(run_experiment(rc));
  rc.workers = 3;  // uneven chunking
  std::string three = report_json(run_experiment(rc));

  CHECK(one == one_again);
  CHECK(one == four);
  CHECK(one == three);
  CHECK(one.find("workers") == std::string::npos);
}

TEST_CASE("empirical step rates track the closed forms") {
  RunConfig rc = micro_run(4, 1.0 / 3.0, 3000, 99);
  rc.workers = 4;
  RunReport rep = run_experiment(rc);

  CHECK(rep.successes == rc.trials);
  CHECK(rep.trials_with_bits == rc.trials);
  CHECK(rep.even_parity_count == rc.trials);
  REQUIRE(rep.steps.size() == 2);
  for (const auto& step : rep.steps) {
    CHECK(std::isfinite(step.analytic));
    CHECK(oracle::within_sigma(step.successes, step.attempts, step.analytic, 4.0));
  }
}

TEST_CASE("abstract engine matches the same closed forms") {
  RunConfig rc = micro_run(16, 0.2, 2000, 7);
  rc.protocol.engine = EngineKind::kAbstract;
  rc.workers = 2;
  RunReport rep = run_experiment(rc);

  CHECK(rep.trials_with_bits == 0);
  REQUIRE(rep.steps.size() == 4);  // connect-L1..L3 and closure
  for (const auto& step : rep.steps)
    CHECK(oracle::within_sigma(step.successes, step.attempts, step.analytic, 4.0));

  double formula = analytics::improved_time_s(16, 0.2, rc.protocol.prep.t0_s());
  CHECK(rep.wall_mean_s / formula > 0.8);
  CHECK(rep.wall_mean_s / formula < 2.0);
}

TEST_CASE("capped trials are counted and excluded") {
  // Lossless n = 8 needs 3200 pulses on average, so a cap just above the
  // mean leaves some trials finished and some aborted.
  RunConfig rc = micro_run(8, 0.0, 40, 31);
  rc.protocol.engine = EngineKind::kAbstract;
  rc.protocol.attempt_cap = 3500;
  RunReport rep = run_experiment(rc);

  CHECK(rep.successes + rep.aborted_cap == rc.trials);
  CHECK(rep.aborted_cap > 0);
  CHECK(rep.successes > 0);
  bool noted = false;
  for (const auto& note : rep.notes)
    if (note.find("pulse cap") != std::string::npos) noted = true;
  CHECK(noted);
}

TEST_CASE("a run where every trial caps is an error, not a report") {
  RunConfig rc = micro_run(64, 0.5, 5, 1);
  rc.protocol.engine = EngineKind::kAbstract;
  rc.protocol.scheme = Scheme::kBasic;
  rc.protocol.attempt_cap = 1000;
  CHECK_THROWS_AS(run_experiment(rc), GuardError);
}

TEST_CASE("invalid run configurations are rejected up front") {
  RunConfig rc = micro_run(4, 0.0, 0, 1);
  CHECK_THROWS_AS(run_experiment(rc), ConfigError);
  rc.trials = 10;
  rc.workers = 0;
  CHECK_THROWS_AS(run_experiment(rc), ConfigError);
}

TEST_CASE("report json carries the analytic block and parity summary") {
  RunConfig rc = micro_run(4, 0.0, 200, 5);
  rc.protocol.phase_mode = PhaseMode::kMirrored;
  RunReport rep = run_experiment(rc);
  json j = json::parse(report_json(rep));

  CHECK(j["config"]["n"] == 4);
  CHECK(j["config"]["scheme"] == "improved");
  CHECK(j["config"]["engine"] == "microscopic");
  CHECK(j["config"]["phases"] == "mirrored");
  CHECK(j["config"].contains("workers") == false);
  CHECK(j["link_phases"].size() == 4);
  CHECK(std::abs(j["total_phase"].get<double>()) < 1e-12);

  CHECK(j["analytic"]["improved_s"].get<double>() ==
        doctest::Approx(analytics::improved_time_s(4, 0.0, 1e-5)));
  CHECK(j["analytic"]["asymptotic_s"].is_null());
  CHECK(j["analytic"]["connect_success"].size() == 1);

  CHECK(j["results"]["successes"] == 200);
  CHECK(j["results"]["parity"]["trials_with_bits"] == 200);
  CHECK(j["results"]["parity"]["even_fraction"] == 1.0);
  for (const auto& step : j["results"]["steps"]) {
    CHECK(step.contains("abs_diff"));
    CHECK(step["attempts"].get<uint64_t>() >= step["successes"].get<uint64_t>());
  }

  bool noted_asym = false;
  for (const auto& note : j["notes"])
    if (note.get<std::string>().find("asymptotic") != std::string::npos) noted_asym = true;
  CHECK(noted_asym);
}

TEST_CASE("the worked-example report points at the timing discrepancy") {
  RunConfig rc = micro_run(16, 1.0 / 3.0, 40, 12);
  rc.protocol.engine = EngineKind::kAbstract;
  RunReport rep = run_experiment(rc);
  std::string text = report_json(rep);
  CHECK(text.find("~50 ms") != std::string::npos);
  CHECK(text.find("0.164025") != std::string::npos);
}

TEST_CASE("oracle scenarios produce self-checking json") {
  OracleRequest req;

  SUBCASE("pair") {
    req.scenario = "pair";
    json j = json::parse(run_oracle_json(req));
    CHECK(j["t0_s"].get<double>() == doctest::Approx(1e-5));
    CHECK(j["pair_fidelity"].get<double>() == doctest::Approx(0.99));
  }

  SUBCASE("step1") {
    req.scenario = "step1";
    req.eta = 0.2;
    json j = json::parse(run_oracle_json(req));
    CHECK(j["acceptance_abs_diff"].get<double>() < 1e-12);
    CHECK(j["vacuum_weight_abs_diff"].get<double>() < 1e-12);
    CHECK(j["acceptance"].get<double>() ==
          doctest::Approx(analytics::connect_success(1, 0.2)).epsilon(1e-12));
  }

  SUBCASE("ladder") {
    req.scenario = "ladder";
    req.n = 8;
    req.eta = 1.0 / 3.0;
    req.phases = PhaseMode::kRandom;
    json j = json::parse(run_oracle_json(req));
    REQUIRE(j["connections"].size() == 3);
    for (const auto& c : j["connections"]) {
      CHECK(c["acceptance_abs_diff"].get<double>() < 1e-12);
      CHECK(c["vacuum_weight_abs_diff"].get<double>() < 1e-12);
    }
    CHECK(j["closure_acceptance_abs_diff"].get<double>() < 1e-12);
    CHECK(j["ghz_fidelity"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("unknown scenario") {
    req.scenario = "bogus";
    CHECK_THROWS_AS(run_oracle_json(req), ConfigError);
  }

  SUBCASE("deterministic output") {
    req.scenario = "ladder";
    req.n = 4;
    req.phases = PhaseMode::kRandom;
    CHECK(run_oracle_json(req) == run_oracle_json(req));
  }
}
