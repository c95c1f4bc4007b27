// ghz-sim: command line front end for the ring-entanglement simulator.
// Subcommands: analytic (closed forms), simulate (Monte Carlo runs),
// oracle (exactly solvable cross-checks), scaling (parameter sweeps).
//
// Exit codes: 0 success, 2 bad configuration or usage, 3 engine guard
// tripped, 1 anything unexpected.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ghzsim/analytics.hpp"
#include "ghzsim/errors.hpp"
#include "ghzsim/experiment.hpp"
#include "ghzsim/protocol.hpp"

namespace {

using ghzsim::ConfigError;

// Accepts plain decimals and fractions like "1/3" so lossy benchmarks can be
// stated exactly the way they are quoted.
double parse_eta(const std::string& text) {
  auto parse_num = [](const std::string& s) {
    size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(s, &used);
    } catch (const std::exception&) {
      throw ConfigError("could not parse number: '" + s + "'");
    }
    if (used != s.size()) throw ConfigError("trailing characters in number: '" + s + "'");
    return value;
  };
  size_t slash = text.find('/');
  if (slash == std::string::npos) return parse_num(text);
  double num = parse_num(text.substr(0, slash));
  double den = parse_num(text.substr(slash + 1));
  if (den == 0.0) throw ConfigError("eta fraction has a zero denominator");
  return num / den;
}

ghzsim::Scheme parse_scheme(const std::string& name) {
  if (name == "basic") return ghzsim::Scheme::kBasic;
  if (name == "improved") return ghzsim::Scheme::kImproved;
  throw ConfigError("unknown scheme '" + name + "' (basic, improved)");
}

ghzsim::EngineKind parse_engine(const std::string& name) {
  if (name == "micro") return ghzsim::EngineKind::kMicroscopic;
  if (name == "abstract") return ghzsim::EngineKind::kAbstract;
  throw ConfigError("unknown engine '" + name + "' (micro, abstract)");
}

ghzsim::PhaseMode parse_phases(const std::string& name) {
  if (name == "zero") return ghzsim::PhaseMode::kZero;
  if (name == "random") return ghzsim::PhaseMode::kRandom;
  if (name == "mirrored") return ghzsim::PhaseMode::kMirrored;
  throw ConfigError("unknown phase mode '" + name + "' (zero, random, mirrored)");
}

ghzsim::RestartMode parse_restart(const std::string& name) {
  if (name == "all") return ghzsim::RestartMode::kRestartAll;
  if (name == "local") return ghzsim::RestartMode::kLocalRetry;
  throw ConfigError("unknown restart mode '" + name + "' (all, local)");
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file: " + out_path);
  out << text;
}

std::string analytic_json(int n, double eta, const ghzsim::PrepParams& prep) {
  namespace an = ghzsim::analytics;
  nlohmann::ordered_json j;
  double t0 = prep.t0_s();
  j["n"] = n;
  j["eta"] = eta;
  j["p0"] = prep.p0;
  j["f_p"] = prep.f_p;
  j["t0_s"] = t0;
  j["pair_fidelity"] = an::pair_fidelity(prep.p0);
  j["basic_s"] = an::basic_time_s(n, eta, t0);
  j["basic_log10"] = an::basic_time_log10(n, eta, t0);
  j["basic_acceptance"] = an::basic_acceptance(n, eta);
  j["memoryless_repeats_log10"] = an::memoryless_repeats_log10(n, prep.p0);

  bool laddered = n >= 4 && (n & (n - 1)) == 0;
  j["improved_s"] = nullptr;
  if (laddered) {
    int levels = an::ladder_levels(n);
    j["improved_s"] = an::improved_time_s(n, eta, t0);
    j["quadratic_s"] = n * double(n) * t0 / 2.0;
    if (eta == 0.0)
      j["asymptotic_s"] = nullptr;
    else
      j["asymptotic_s"] = an::asymptotic_time_s(n, eta, t0);
    j["modeled_wall_s"] = an::modeled_improved_time_s(n, eta, prep);
    nlohmann::ordered_json connect = nlohmann::ordered_json::array();
    nlohmann::ordered_json vac = nlohmann::ordered_json::array();
    for (int i = 1; i <= levels; ++i) {
      connect.push_back(an::connect_success(i, eta));
      vac.push_back(an::vacuum_coeff(i, eta));
    }
    j["connect_success"] = std::move(connect);
    j["vacuum_coeff"] = std::move(vac);
    j["close_success"] = an::close_success(levels, eta);
  }
  return j.dump(2) + "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simulator and calculator for heralded n-party ring entanglement"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "1.0.0");

  std::string eta_text = "0";
  std::string out_path;
  int n = 4;
  ghzsim::PrepParams prep;

  CLI::App* analytic = app.add_subcommand("analytic", "closed-form figures for one configuration");
  analytic->add_option("--n", n, "number of ensembles")->capture_default_str();
  analytic->add_option("--eta", eta_text, "photon loss probability (decimal or a/b)")
      ->capture_default_str();
  analytic->add_option("--p0", prep.p0, "pair source success probability per pulse")
      ->capture_default_str();
  analytic->add_option("--fp", prep.f_p, "pulse repetition rate in Hz")->capture_default_str();
  analytic->add_option("--out", out_path, "write to this file instead of stdout");

  uint64_t trials = 1000, seed = 12345, cap = 10'000'000;
  int workers = 1;
  std::string scheme_text = "improved", engine_text = "micro", phases_text = "zero",
              restart_text = "all";
  bool serial_prep = false;

  CLI::App* simulate = app.add_subcommand("simulate", "run Monte Carlo trials and report");
  simulate->add_option("--n", n, "number of ensembles")->capture_default_str();
  simulate->add_option("--eta", eta_text, "photon loss probability (decimal or a/b)")
      ->capture_default_str();
  simulate->add_option("--p0", prep.p0, "pair source success probability per pulse")
      ->capture_default_str();
  simulate->add_option("--fp", prep.f_p, "pulse repetition rate in Hz")->capture_default_str();
  simulate->add_option("--scheme", scheme_text, "basic or improved")->capture_default_str();
  simulate->add_option("--engine", engine_text, "micro or abstract")->capture_default_str();
  simulate->add_option("--phases", phases_text, "zero, random or mirrored")
      ->capture_default_str();
  simulate->add_option("--restart", restart_text, "all or local (abstract engine)")
      ->capture_default_str();
  simulate->add_option("--trials", trials, "independent trials")->capture_default_str();
  simulate->add_option("--seed", seed, "master seed")->capture_default_str();
  simulate->add_option("--workers", workers, "worker threads (never changes results)")
      ->capture_default_str();
  simulate->add_option("--cap", cap, "source pulses per trial before giving up")
      ->capture_default_str();
  simulate->add_flag("--serial-prep", serial_prep,
                     "charge pair preparations one after another instead of in parallel");
  simulate->add_option("--out", out_path, "write to this file instead of stdout");

  std::string scenario = "step1";
  CLI::App* oracle = app.add_subcommand("oracle", "exactly solvable cross-checks");
  oracle->add_option("--scenario", scenario, "pair, step1 or ladder")->capture_default_str();
  oracle->add_option("--n", n, "ring size for the ladder scenario")->capture_default_str();
  oracle->add_option("--eta", eta_text, "photon loss probability (decimal or a/b)")
      ->capture_default_str();
  oracle->add_option("--phases", phases_text, "zero, random or mirrored")
      ->capture_default_str();
  oracle->add_option("--seed", seed, "seed for drawn link phases")->capture_default_str();
  oracle->add_option("--out", out_path, "write to this file instead of stdout");

  std::vector<int> sweep_ns{4, 8, 16, 32, 64};
  std::vector<std::string> sweep_etas{"0", "0.1", "0.2", "1/3"};
  double t0 = 1e-5;
  std::string format = "csv";
  CLI::App* scaling = app.add_subcommand("scaling", "sweep closed forms over n and eta");
  scaling->add_option("--n", sweep_ns, "ring sizes (powers of two, >= 4)")
      ->capture_default_str();
  scaling->add_option("--eta", sweep_etas, "loss probabilities (decimal or a/b)")
      ->capture_default_str();
  scaling->add_option("--t0", t0, "pair preparation time in seconds")->capture_default_str();
  scaling->add_option("--format", format, "csv or json")->capture_default_str();
  scaling->add_option("--out", out_path, "write to this file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (analytic->parsed()) {
      emit(analytic_json(n, parse_eta(eta_text), prep), out_path);
    } else if (simulate->parsed()) {
      ghzsim::RunConfig rc;
      rc.protocol.n = n;
      rc.protocol.noise.eta = parse_eta(eta_text);
      rc.protocol.prep = prep;
      rc.protocol.scheme = parse_scheme(scheme_text);
      rc.protocol.engine = parse_engine(engine_text);
      rc.protocol.phase_mode = parse_phases(phases_text);
      rc.protocol.restart = parse_restart(restart_text);
      rc.protocol.parallel_prep = !serial_prep;
      rc.protocol.attempt_cap = cap;
      rc.trials = trials;
      rc.seed = seed;
      rc.workers = workers;
      emit(ghzsim::report_json(ghzsim::run_experiment(rc)), out_path);
    } else if (oracle->parsed()) {
      ghzsim::OracleRequest req;
      req.scenario = scenario;
      req.n = n;
      req.eta = parse_eta(eta_text);
      req.phases = parse_phases(phases_text);
      req.seed = seed;
      emit(ghzsim::run_oracle_json(req), out_path);
    } else if (scaling->parsed()) {
      std::vector<double> etas;
      etas.reserve(sweep_etas.size());
      for (const std::string& text : sweep_etas) etas.push_back(parse_eta(text));
      auto rows = ghzsim::analytics::scaling_sweep(sweep_ns, etas, t0);
      if (format == "csv")
        emit(ghzsim::analytics::scaling_csv(rows), out_path);
      else if (format == "json")
        emit(ghzsim::analytics::scaling_json(rows), out_path);
      else
        throw ConfigError("unknown format '" + format + "' (csv, json)");
    }
    return 0;
  } catch (const ghzsim::GuardError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << '\n';
    return 1;
  }
}
