#pragma once

#include <vector>

#include "ghzsim/measurement.hpp"
#include "ghzsim/noise.hpp"
#include "ghzsim/sparse_state.hpp"

namespace ghzsim {
namespace exact {

/// (h_i + e^{i phase} v_j) / sqrt(2) on a register of n_register ensembles.
SparseState pair_state(int n_register, int i, int j, double phase);

/// Ideal merged-block reference spanning ensembles lo..hi:
/// (h_lo..h_{hi-1} + e^{i phase} v_{lo+1}..v_hi) / sqrt(2).
SparseState chain_reference(int n_register, int lo, int hi, double phase);

/// One merge of the ladder, heralded by single occupancy on the two
/// ensembles flanking the new link.
struct ConnectionReport {
  int level = 0;
  int lo = 0;
  int mid = 0;  // link prepared on (mid, mid + 1)
  int hi = 0;
  double acceptance = 0.0;
  double vacuum_weight = 0.0;  // weight with both block boundaries empty
};

struct LadderResult {
  BranchMixture posterior;
  std::vector<ConnectionReport> connections;
  bool closed = false;
  double closure_acceptance = 0.0;
  double total_phase = 0.0;
  double ghz_fidelity = 0.0;  // against the n-party target, when closed
};

/// Runs the full merge ladder for an n-ensemble ring with exact loss
/// accounting: pairs on (1,2), (3,4), ..., merged pairwise level by level,
/// then the ring closed through the (n, 1) link. link_phases[i-1] is the
/// phase of the (i, i+1 mod n) link; n of them. Needs n a power of two
/// with 4 <= n <= 16 (state space doubles with n).
LadderResult run_ladder(int n, double eta, const std::vector<double>& link_phases,
                        bool include_closure = true);

/// The first merge in isolation on a 4-ensemble register: pairs (1,2) and
/// (3,4) joined through a (2,3) link. Acceptance and the vacuum weight of
/// the posterior at ensembles {1, 4} have closed forms checked in tests.
struct StepOneResult {
  double acceptance = 0.0;
  double vacuum_weight = 0.0;
  BranchMixture posterior;
};

StepOneResult step_one(double eta, double phi_left = 0.0, double phi_link = 0.0,
                       double phi_right = 0.0);

}  // namespace exact
}  // namespace ghzsim
