#include "ghzsim/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <thread>

#include <json.hpp>

#include "ghzsim/errors.hpp"
#include "ghzsim/exact_ladder.hpp"

namespace ghzsim {

namespace {

using ordered_json = nlohmann::ordered_json;

// Stream id reserved for the per-run link-phase draw; trial k uses stream k.
constexpr uint64_t kPhaseStream = 0xFFFFFFFFFFFFFFFFull;

const char* scheme_name(Scheme s) { return s == Scheme::kBasic ? "basic" : "improved"; }
const char* engine_name(EngineKind e) {
  return e == EngineKind::kMicroscopic ? "microscopic" : "abstract";
}
const char* phase_name(PhaseMode m) {
  switch (m) {
    case PhaseMode::kZero: return "zero";
    case PhaseMode::kRandom: return "random";
    default: return "mirrored";
  }
}
const char* restart_name(RestartMode m) {
  return m == RestartMode::kRestartAll ? "all" : "local";
}

double step_analytic(const std::string& name, const ProtocolConfig& cfg) {
  if (name == "chain-round") return analytics::basic_acceptance(cfg.n, cfg.noise.eta);
  if (name == "closure")
    return analytics::close_success(analytics::ladder_levels(cfg.n), cfg.noise.eta);
  const std::string prefix = "connect-L";
  if (name.rfind(prefix, 0) == 0)
    return analytics::connect_success(std::stoi(name.substr(prefix.size())), cfg.noise.eta);
  return std::nan("");
}

ordered_json analytic_block(const ProtocolConfig& cfg) {
  ordered_json j;
  double t0 = cfg.prep.t0_s();
  j["t0_s"] = t0;
  j["pair_fidelity"] = analytics::pair_fidelity(cfg.prep.p0);
  j["basic_s"] = analytics::basic_time_s(cfg.n, cfg.noise.eta, t0);
  j["basic_acceptance"] = analytics::basic_acceptance(cfg.n, cfg.noise.eta);
  j["memoryless_repeats_log10"] = analytics::memoryless_repeats_log10(cfg.n, cfg.prep.p0);
  if (cfg.scheme == Scheme::kImproved) {
    int levels = analytics::ladder_levels(cfg.n);
    j["improved_s"] = analytics::improved_time_s(cfg.n, cfg.noise.eta, t0);
    j["quadratic_s"] = cfg.n * double(cfg.n) * t0 / 2.0;
    if (cfg.noise.eta == 0.0)
      j["asymptotic_s"] = nullptr;
    else
      j["asymptotic_s"] = analytics::asymptotic_time_s(cfg.n, cfg.noise.eta, t0);
    j["modeled_wall_s"] = analytics::modeled_improved_time_s(cfg.n, cfg.noise.eta, cfg.prep);
    ordered_json connect = ordered_json::array();
    ordered_json vac = ordered_json::array();
    for (int i = 1; i <= levels; ++i) {
      connect.push_back(analytics::connect_success(i, cfg.noise.eta));
      vac.push_back(analytics::vacuum_coeff(i, cfg.noise.eta));
    }
    j["connect_success"] = std::move(connect);
    j["vacuum_coeff"] = std::move(vac);
    j["close_success"] = analytics::close_success(levels, cfg.noise.eta);
  }
  return j;
}

}  // namespace

RunReport run_experiment(const RunConfig& cfg) {
  validate(cfg.protocol);
  if (cfg.trials == 0) throw ConfigError("trials must be positive");
  if (cfg.workers < 1) throw ConfigError("workers must be >= 1");

  RunReport report;
  report.config = cfg;

  TrialRng phase_rng(cfg.seed, kPhaseStream);
  report.link_phases = assign_phases(cfg.protocol.n, cfg.protocol.phase_mode, phase_rng);
  for (double phi : report.link_phases) report.total_phase += phi;

  std::vector<TrialRecord> records(cfg.trials);
  auto run_range = [&](uint64_t begin, uint64_t end) {
    for (uint64_t k = begin; k < end; ++k) {
      TrialRng rng(cfg.seed, k);
      records[k] = run_trial(cfg.protocol, report.link_phases, rng);
    }
  };
  uint64_t workers = std::min<uint64_t>(static_cast<uint64_t>(cfg.workers), cfg.trials);
  if (workers <= 1) {
    run_range(0, cfg.trials);
  } else {
    std::vector<std::thread> pool;
    uint64_t chunk = (cfg.trials + workers - 1) / workers;
    for (uint64_t w = 0; w < workers; ++w) {
      uint64_t begin = w * chunk;
      uint64_t end = std::min(cfg.trials, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(run_range, begin, end);
    }
    for (auto& t : pool) t.join();
  }

  // Aggregate strictly in trial order so thread count cannot leak into sums.
  std::map<std::string, StepCount> steps;
  std::vector<double> walls;
  double wall_sum = 0.0, faithful_sum = 0.0, preps_sum = 0.0, elem_sum = 0.0;
  for (const TrialRecord& rec : records) {
    if (rec.status == TrialStatus::kAbortedCap) {
      report.aborted_cap += 1;
      continue;
    }
    report.successes += 1;
    walls.push_back(rec.wall_s);
    wall_sum += rec.wall_s;
    faithful_sum += rec.parallel_max_wall_s;
    preps_sum += double(rec.pair_preps);
    elem_sum += double(rec.elementary_attempts);
    for (const auto& [name, count] : rec.step_attempts) {
      steps[name].attempts += count.attempts;
      steps[name].successes += count.successes;
    }
    if (rec.has_bits()) {
      report.trials_with_bits += 1;
      if (rec.even_parity()) report.even_parity_count += 1;
    }
  }

  if (report.successes == 0)
    throw GuardError("every trial hit the pulse cap; raise attempt_cap or shrink the problem");

  double n_ok = double(report.successes);
  report.wall_mean_s = wall_sum / n_ok;
  report.parallel_max_wall_mean_s = faithful_sum / n_ok;
  report.pair_preps_mean = preps_sum / n_ok;
  report.elementary_mean = elem_sum / n_ok;
  std::sort(walls.begin(), walls.end());
  report.wall_median_s = walls.size() % 2 == 1
                             ? walls[walls.size() / 2]
                             : 0.5 * (walls[walls.size() / 2 - 1] + walls[walls.size() / 2]);

  for (const auto& [name, count] : steps) {
    StepSummary s;
    s.name = name;
    s.attempts = count.attempts;
    s.successes = count.successes;
    s.empirical = count.attempts ? double(count.successes) / double(count.attempts) : 0.0;
    s.std_err = count.attempts
                    ? std::sqrt(std::max(0.0, s.empirical * (1.0 - s.empirical) /
                                                  double(count.attempts)))
                    : 0.0;
    s.analytic = step_analytic(name, cfg.protocol);
    report.steps.push_back(std::move(s));
  }

  if (report.aborted_cap > 0)
    report.notes.push_back(std::to_string(report.aborted_cap) + " of " +
                           std::to_string(cfg.trials) +
                           " trials hit the pulse cap and are excluded from the aggregates");
  if (cfg.protocol.scheme == Scheme::kImproved && cfg.protocol.n == 16 &&
      std::abs(cfg.protocol.noise.eta - 1.0 / 3.0) < 0.02) {
    double t0 = cfg.protocol.prep.t0_s();
    std::string formula = std::to_string(analytics::improved_time_s(16, cfg.protocol.noise.eta, t0));
    report.notes.push_back("the merge-ladder formula gives " + formula +
                           " s per delivered state at these parameters; a ~50 ms budget at the "
                           "same t0 corresponds to eta near 0.25, not 1/3");
  }
  if (cfg.protocol.scheme == Scheme::kImproved && cfg.protocol.noise.eta == 0.0)
    report.notes.push_back("asymptotic_s is omitted: the large-n closed form degenerates at eta = 0");

  return report;
}

std::string report_json(const RunReport& report, int indent) {
  const ProtocolConfig& p = report.config.protocol;
  ordered_json j;
  ordered_json cfg;
  cfg["n"] = p.n;
  cfg["eta"] = p.noise.eta;
  cfg["p0"] = p.prep.p0;
  cfg["f_p"] = p.prep.f_p;
  cfg["scheme"] = scheme_name(p.scheme);
  cfg["engine"] = engine_name(p.engine);
  cfg["phases"] = phase_name(p.phase_mode);
  cfg["restart"] = restart_name(p.restart);
  cfg["parallel_prep"] = p.parallel_prep;
  cfg["attempt_cap"] = p.attempt_cap;
  cfg["trials"] = report.config.trials;
  cfg["seed"] = report.config.seed;
  j["config"] = std::move(cfg);
  j["link_phases"] = report.link_phases;
  j["total_phase"] = report.total_phase;
  j["analytic"] = analytic_block(p);

  ordered_json res;
  res["successes"] = report.successes;
  res["aborted_cap"] = report.aborted_cap;
  res["wall_mean_s"] = report.wall_mean_s;
  res["wall_median_s"] = report.wall_median_s;
  res["parallel_max_wall_mean_s"] = report.parallel_max_wall_mean_s;
  double formula = p.scheme == Scheme::kBasic
                       ? analytics::basic_time_s(p.n, p.noise.eta, p.prep.t0_s())
                       : analytics::improved_time_s(p.n, p.noise.eta, p.prep.t0_s());
  res["wall_mean_over_formula"] = report.wall_mean_s / formula;
  res["pair_preps_mean"] = report.pair_preps_mean;
  res["elementary_attempts_mean"] = report.elementary_mean;
  ordered_json steps = ordered_json::array();
  for (const auto& s : report.steps) {
    ordered_json step;
    step["name"] = s.name;
    step["attempts"] = s.attempts;
    step["successes"] = s.successes;
    step["empirical"] = s.empirical;
    step["std_err"] = s.std_err;
    if (std::isnan(s.analytic)) {
      step["analytic"] = nullptr;
    } else {
      step["analytic"] = s.analytic;
      step["abs_diff"] = std::abs(s.empirical - s.analytic);
    }
    steps.push_back(std::move(step));
  }
  res["steps"] = std::move(steps);
  ordered_json parity;
  parity["trials_with_bits"] = report.trials_with_bits;
  parity["even_count"] = report.even_parity_count;
  if (report.trials_with_bits > 0)
    parity["even_fraction"] = double(report.even_parity_count) / double(report.trials_with_bits);
  res["parity"] = std::move(parity);
  j["results"] = std::move(res);
  j["notes"] = report.notes;
  return j.dump(indent) + "\n";
}

std::string run_oracle_json(const OracleRequest& request, int indent) {
  ordered_json j;
  j["scenario"] = request.scenario;
  if (request.scenario == "pair") {
    PrepParams prep;
    j["t0_s"] = prep.t0_s();
    j["pair_fidelity"] = analytics::pair_fidelity(prep.p0);
    return j.dump(indent) + "\n";
  }
  if (!(request.eta >= 0.0 && request.eta < 1.0)) throw ConfigError("eta must lie in [0, 1)");
  if (request.scenario == "step1") {
    exact::StepOneResult step = exact::step_one(request.eta);
    double analytic = analytics::connect_success(1, request.eta);
    double vac = analytics::vacuum_coeff(1, request.eta);
    j["eta"] = request.eta;
    j["acceptance"] = step.acceptance;
    j["acceptance_analytic"] = analytic;
    j["acceptance_abs_diff"] = std::abs(step.acceptance - analytic);
    j["vacuum_weight"] = step.vacuum_weight;
    j["vacuum_weight_analytic"] = vac / (1.0 + vac);
    j["vacuum_weight_abs_diff"] = std::abs(step.vacuum_weight - vac / (1.0 + vac));
    j["posterior_branches"] = step.posterior.size();
    return j.dump(indent) + "\n";
  }
  if (request.scenario == "ladder") {
    TrialRng rng(request.seed, kPhaseStream);
    std::vector<double> phases = assign_phases(request.n, request.phases, rng);
    exact::LadderResult ladder = exact::run_ladder(request.n, request.eta, phases);
    j["n"] = request.n;
    j["eta"] = request.eta;
    j["phases"] = phase_name(request.phases);
    ordered_json connections = ordered_json::array();
    for (const auto& c : ladder.connections) {
      ordered_json cj;
      cj["level"] = c.level;
      cj["span"] = {c.lo, c.hi};
      cj["acceptance"] = c.acceptance;
      double analytic = analytics::connect_success(c.level, request.eta);
      cj["acceptance_analytic"] = analytic;
      cj["acceptance_abs_diff"] = std::abs(c.acceptance - analytic);
      double vac = analytics::vacuum_coeff(c.level, request.eta);
      cj["vacuum_weight"] = c.vacuum_weight;
      cj["vacuum_weight_analytic"] = vac / (1.0 + vac);
      cj["vacuum_weight_abs_diff"] = std::abs(c.vacuum_weight - vac / (1.0 + vac));
      connections.push_back(std::move(cj));
    }
    j["connections"] = std::move(connections);
    double close_analytic =
        analytics::close_success(analytics::ladder_levels(request.n), request.eta);
    j["closure_acceptance"] = ladder.closure_acceptance;
    j["closure_acceptance_analytic"] = close_analytic;
    j["closure_acceptance_abs_diff"] = std::abs(ladder.closure_acceptance - close_analytic);
    j["total_phase"] = ladder.total_phase;
    j["ghz_fidelity"] = ladder.ghz_fidelity;
    return j.dump(indent) + "\n";
  }
  throw ConfigError("unknown oracle scenario: " + request.scenario);
}

}  // namespace ghzsim
