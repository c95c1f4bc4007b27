#pragma once

#include <utility>
#include <vector>

#include "ghzsim/noise.hpp"
#include "ghzsim/rng.hpp"
#include "ghzsim/sparse_state.hpp"

namespace ghzsim {

/// Polarization rotation applied to one ensemble before photon counting.
/// theta = pi/4, phi = 0 is the balanced detection basis used by the
/// protocols; other angles are exposed for basis-invariance checks.
struct RotationSpec {
  double theta = 0.78539816339744830961;
  double phi = 0.0;
};

/// Rewrites the h/v modes of `ensemble` in the rotated basis. Unitary, so
/// norms are preserved. Throws std::domain_error if any term holds more
/// than kPhotonCutoff photons on the ensemble.
SparseState rotate_ensemble(const SparseState& state, int ensemble, RotationSpec spec);
BranchMixture rotate_ensemble(const BranchMixture& mix, int ensemble, RotationSpec spec);

/// Photon counts seen on one ensemble's pair of detectors.
struct ClickOutcome {
  int ensemble = 0;
  int n_h = 0;
  int n_v = 0;
  /// Heralded success: exactly one photon arrived at this ensemble.
  bool accepted() const { return n_h + n_v == 1; }
  /// Measurement bit for an accepted outcome (0 for the h detector).
  int bit() const { return n_v; }
};

/// One element of the exact outcome distribution for a detection.
struct DetectionOutcome {
  ClickOutcome click;
  double probability = 0.0;
  BranchMixture posterior;
};

/// Full outcome distribution of damping `ensemble` with probability `eta`
/// per photon, rotating by `spec`, and counting photons. Probabilities sum
/// to one. Posteriors are normalized mixtures conditioned on the outcome.
std::vector<DetectionOutcome> detect_ensemble_exact(const BranchMixture& mix, int ensemble,
                                                    double eta, RotationSpec spec);

/// Samples one detection of `ensemble`: sampled loss, rotation, then one
/// click pattern. Returns the outcome and the collapsed post-measurement
/// state (the counted photons stay in the record; the caller decides
/// whether the ensemble is reused).
std::pair<ClickOutcome, SparseState> detect_ensemble_sample(const SparseState& state, int ensemble,
                                                            double eta, RotationSpec spec,
                                                            TrialRng& rng);

/// Result of a heralded projection onto single occupancy.
struct PostselectResult {
  double acceptance = 0.0;
  BranchMixture posterior;
};

/// Applies photon loss to every mode of the listed ensembles, then keeps
/// only the component where each listed ensemble holds exactly one photon
/// (h or v). The retained photons and their coherences survive in the
/// posterior. Acceptance does not depend on any rotation applied to the
/// measured ensembles beforehand.
PostselectResult postselect_single(const BranchMixture& mix, const std::vector<int>& ensembles,
                                   double eta);
PostselectResult postselect_single(const SparseState& state, const std::vector<int>& ensembles,
                                   double eta);

}  // namespace ghzsim
