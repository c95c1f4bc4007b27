#pragma once

#include <utility>
#include <vector>

#include "ghzsim/rng.hpp"
#include "ghzsim/sparse_state.hpp"

namespace ghzsim {

struct NoiseParams {
  // Probability that any given photon is lost before its detector fires.
  // Lumps channel attenuation, coupling and detector inefficiency.
  double eta = 0.0;
};

struct Branch {
  double weight = 0.0;
  SparseState state;
};

// Classical mixture of pure states, produced by loss channels and
// measurements. Canonical form (established by canonical_merged): branches
// normalized, global phase fixed, identical branches merged, zero-weight
// branches dropped, order deterministic.
class BranchMixture {
 public:
  BranchMixture() = default;
  static BranchMixture single(SparseState state);

  const std::vector<Branch>& branches() const { return branches_; }
  size_t size() const { return branches_.size(); }
  double total_weight() const;

  friend BranchMixture canonical_merged(std::vector<Branch> raw, double tol);
  friend BranchMixture mixture_from_canonical(std::vector<Branch> branches);

 private:
  std::vector<Branch> branches_;
};

// Wraps branches that are already in canonical form without touching them;
// the exact inverse of reading branches() back. Deserialization uses this
// so a save/load cycle reproduces every bit.
BranchMixture mixture_from_canonical(std::vector<Branch> branches);

// Normalizes each branch (folding the squared norm into the weight), fixes
// the global phase so the largest-magnitude amplitude is real and positive
// (ties broken by lexicographically smallest key), merges equal branches,
// drops weights below tol, and sorts descending by weight then by state for
// a deterministic order.
BranchMixture canonical_merged(std::vector<Branch> raw, double tol = 1e-12);

// Rescales weights to sum to one. An empty mixture stays empty.
BranchMixture renormalized(const BranchMixture& mix);

bool approx_equal(const BranchMixture& a, const BranchMixture& b, double tol = 1e-10);

// Fidelity of the mixture against a normalized pure target:
// sum_b w_b |<target|b>|^2.
double mixture_fidelity(const BranchMixture& mix, const SparseState& target);

// Total weight of branches whose every term leaves all listed ensembles
// empty; the vacuum component tracked through connection steps.
double vacuum_weight(const BranchMixture& mix, const std::vector<int>& ensembles);

// Amplitude damping (photon loss with probability eta) on a single mode.
// Branches are indexed by the number of photons lost; the Kraus element for
// losing k of m photons carries sqrt(C(m,k) (1-eta)^{m-k} eta^k).
BranchMixture damp_mode_exact(const SparseState& state, ModeId mode, double eta);
BranchMixture damp_mode_exact(const BranchMixture& mix, ModeId mode, double eta);

// Loss applied to every mode of the register.
BranchMixture damp_all_exact(const SparseState& state, double eta);

// Record of a sampled loss pass: photons lost per flat mode index.
struct LossRecord {
  std::vector<int> lost_per_mode;
  int total_lost = 0;
};

// Samples one loss branch on the listed modes and collapses to it.
std::pair<SparseState, LossRecord> damp_modes_sample(const SparseState& state,
                                                     const std::vector<ModeId>& modes, double eta,
                                                     TrialRng& rng);

// Samples one loss branch over all modes.
std::pair<SparseState, LossRecord> damp_sample(const SparseState& state, double eta, TrialRng& rng);

}  // namespace ghzsim
