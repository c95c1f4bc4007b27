#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ghzsim {

/// Source parameters for one entangled-pair generation attempt.
/// p0 is the per-pulse success probability (also the infidelity floor of a
/// delivered pair) and f_p the pulse repetition rate in Hz.
struct PrepParams {
  double p0 = 0.01;
  double f_p = 1e7;
  /// Mean time to herald one pair: 1 / (p0 * f_p).
  double t0_s() const { return 1.0 / (p0 * f_p); }
};

namespace analytics {

/// Mean pair preparation time in seconds.
double pair_time_s(const PrepParams& prep);

/// Fidelity of a heralded pair, 1 - p0.
double pair_fidelity(double p0);

/// Levels of pairwise merging before closure for an n-party ring:
/// log2(n) - 1. Requires n a power of two, n >= 4.
int ladder_levels(int n);

/// Vacuum-to-signal weight ratio after i merge levels: 2 eta (2^i - 1).
double vacuum_coeff(int i, double eta);

/// Same quantity built by the level recursion c_i = 2 c_{i-1} + 2 eta,
/// iterated on the integer prefactor so it matches vacuum_coeff bitwise.
double vacuum_coeff_recursive(int i, double eta);

/// Success probability of the level-i merge (i >= 1):
/// (1-eta)^2 (1 + 2 eta + 2 c_{i-1}) / (4 (1 + c_{i-1})^2).
double connect_success(int level, double eta);

/// Success probability of closing the ring after `top_level` merges:
/// (1-eta)^2 / (2 (1 + c_top)).
double close_success(int top_level, double eta);

/// Expected run time of the ring scheme without merging:
/// t0 * 2^{n-1} / (1-eta)^n. Exact in doubles at eta = 0.
double basic_time_s(int n, double eta, double t0_s);

/// log10 of basic_time_s, usable far beyond double range.
double basic_time_log10(int n, double eta, double t0_s);

/// Acceptance probability of one ring round: (1-eta)^n / 2^{n-1}.
double basic_acceptance(int n, double eta);

/// Expected run time with pairwise merging:
/// t0 / (close * prod_i connect_i). Equals n^2 t0 / 2 exactly at eta = 0.
double improved_time_s(int n, double eta, double t0_s);

/// Large-n closed form t0 [2 eta n / (1-eta)^2] (n/2)^{log2[2 eta sqrt(n) / (1-eta)^2]}.
/// Throws std::domain_error at eta = 0 where the form degenerates.
double asymptotic_time_s(int n, double eta, double t0_s);

/// log10 of the expected repetition count if n pairs had to herald in the
/// same pulse slot with no memory: n log10(1/p0).
double memoryless_repeats_log10(int n, double p0);

/// E[max(a, G / f_p)] for G geometric(p0) on {1, 2, ...}:
/// a + (1-p0)^m (t0 - a + m / f_p) with m = floor(a f_p).
double expected_max_vs_geom(double a_s, const PrepParams& prep);

/// Mean wall time to assemble one level-`level` block when every merge
/// attempt waits on the slower of the sub-block supply and a fresh link
/// pair: D_0 = t0, D_i = E[max(D_{i-1}, g)] / connect_i.
double modeled_block_time_s(int level, double eta, const PrepParams& prep);

/// Mean wall time through closure under the same attempt model.
double modeled_improved_time_s(int n, double eta, const PrepParams& prep);

struct ScalingRow {
  int n = 0;
  double eta = 0.0;
  double t0_s = 0.0;
  double basic_s = 0.0;
  double improved_s = 0.0;
  double quadratic_s = 0.0;
  double asymptotic_s = 0.0;  // NaN when eta = 0
  std::vector<double> connect;  // connect_success for levels 1..L
  std::vector<double> vacuum;   // vacuum_coeff for levels 1..L
  double close = 0.0;
};

std::vector<ScalingRow> scaling_sweep(const std::vector<int>& ns, const std::vector<double>& etas,
                                      double t0_s);

/// CSV with columns n, eta, t0_s, basic_s, improved_s, quadratic_s,
/// asymptotic_s, p1..pK, c1..cK, p_close where K is the deepest ladder in
/// the sweep; cells that do not apply are left empty.
std::string scaling_csv(const std::vector<ScalingRow>& rows);

std::string scaling_json(const std::vector<ScalingRow>& rows);

}  // namespace analytics
}  // namespace ghzsim
