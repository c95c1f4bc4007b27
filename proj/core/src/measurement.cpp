#include "ghzsim/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace ghzsim {

namespace {

double binomial(int n, int k) {
  double r = 1.0;
  for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
  return r;
}

double factorial(int n) {
  double r = 1.0;
  for (int j = 2; j <= n; ++j) r *= j;
  return r;
}

void check_ensemble(const SparseState& state, int ensemble) {
  if (ensemble < 1 || ensemble > state.ensemble_count())
    throw std::invalid_argument("ensemble index out of range");
}

std::pair<int, int> occupation_pair(const OccupationKey& key, int ensemble) {
  int h = key[static_cast<size_t>(flat_mode_index(mode_h(ensemble)))];
  int v = key[static_cast<size_t>(flat_mode_index(mode_v(ensemble)))];
  return {h, v};
}

SparseState project_occupation(const SparseState& state, int ensemble, int n_h, int n_v) {
  SparseState out(state.mode_count());
  for (const auto& [key, amp] : state.terms()) {
    auto [h, v] = occupation_pair(key, ensemble);
    if (h == n_h && v == n_v) out.accumulate(key, amp);
  }
  return out;
}

SparseState project_single(const SparseState& state, const std::vector<int>& ensembles) {
  SparseState out(state.mode_count());
  for (const auto& [key, amp] : state.terms()) {
    bool keep = true;
    for (int e : ensembles) {
      auto [h, v] = occupation_pair(key, e);
      if (h + v != 1) {
        keep = false;
        break;
      }
    }
    if (keep) out.accumulate(key, amp);
  }
  return out;
}

std::vector<ModeId> ensemble_modes(const std::vector<int>& ensembles) {
  std::vector<ModeId> modes;
  modes.reserve(2 * ensembles.size());
  for (int e : ensembles) {
    modes.push_back(mode_h(e));
    modes.push_back(mode_v(e));
  }
  return modes;
}

}  // namespace

SparseState rotate_ensemble(const SparseState& state, int ensemble, RotationSpec spec) {
  check_ensemble(state, ensemble);
  double c = std::cos(spec.theta);
  double s = std::sin(spec.theta);
  Amplitude eip = std::polar(1.0, spec.phi);
  Amplitude eim = std::polar(1.0, -spec.phi);
  size_t flat_h = static_cast<size_t>(flat_mode_index(mode_h(ensemble)));
  size_t flat_v = static_cast<size_t>(flat_mode_index(mode_v(ensemble)));
  SparseState out(state.mode_count());
  for (const auto& [key, amp] : state.terms()) {
    int a = key[flat_h];
    int b = key[flat_v];
    if (a + b > kPhotonCutoff)
      throw std::domain_error("rotate_ensemble: occupation exceeds photon cutoff");
    if (a + b == 0) {
      out.accumulate(key, amp);
      continue;
    }
    // Creation-operator substitution:
    //   h+ -> cos h+ + e^{i phi} sin v+
    //   v+ -> -e^{-i phi} sin h+ + cos v+
    // expanded binomially over a photons in h and b photons in v.
    double norm_in = std::sqrt(factorial(a) * factorial(b));
    for (int j = 0; j <= a; ++j) {
      for (int k = 0; k <= b; ++k) {
        int new_h = j + k;
        int new_v = (a - j) + (b - k);
        Amplitude coeff = binomial(a, j) * binomial(b, k) * std::pow(c, j + b - k) *
                          std::pow(s, (a - j) + k) *
                          std::sqrt(factorial(new_h) * factorial(new_v)) / norm_in;
        Amplitude phase{1.0, 0.0};
        for (int t = 0; t < a - j; ++t) phase *= eip;
        for (int t = 0; t < k; ++t) phase *= -eim;
        OccupationKey moved = key;
        moved[flat_h] = static_cast<uint8_t>(new_h);
        moved[flat_v] = static_cast<uint8_t>(new_v);
        out.accumulate(moved, amp * coeff * phase);
      }
    }
  }
  return pruned(out);
}

BranchMixture rotate_ensemble(const BranchMixture& mix, int ensemble, RotationSpec spec) {
  std::vector<Branch> raw;
  raw.reserve(mix.size());
  for (const auto& br : mix.branches())
    raw.push_back(Branch{br.weight, rotate_ensemble(br.state, ensemble, spec)});
  return canonical_merged(std::move(raw));
}

std::vector<DetectionOutcome> detect_ensemble_exact(const BranchMixture& mix, int ensemble,
                                                    double eta, RotationSpec spec) {
  BranchMixture damped = damp_mode_exact(mix, mode_h(ensemble), eta);
  damped = damp_mode_exact(damped, mode_v(ensemble), eta);
  BranchMixture rotated = rotate_ensemble(damped, ensemble, spec);

  std::map<std::pair<int, int>, double> probs;
  for (const auto& br : rotated.branches()) {
    for (const auto& [key, amp] : br.state.terms()) {
      auto occ = occupation_pair(key, ensemble);
      probs[occ] += br.weight * std::norm(amp);
    }
  }
  std::vector<DetectionOutcome> outcomes;
  outcomes.reserve(probs.size());
  for (const auto& [occ, p] : probs) {
    DetectionOutcome oc;
    oc.click = ClickOutcome{ensemble, occ.first, occ.second};
    oc.probability = p;
    std::vector<Branch> raw;
    for (const auto& br : rotated.branches())
      raw.push_back(Branch{br.weight, project_occupation(br.state, ensemble, occ.first, occ.second)});
    oc.posterior = renormalized(canonical_merged(std::move(raw)));
    outcomes.push_back(std::move(oc));
  }
  return outcomes;
}

std::pair<ClickOutcome, SparseState> detect_ensemble_sample(const SparseState& state, int ensemble,
                                                            double eta, RotationSpec spec,
                                                            TrialRng& rng) {
  check_ensemble(state, ensemble);
  auto [lossy, record] = damp_modes_sample(state, {mode_h(ensemble), mode_v(ensemble)}, eta, rng);
  SparseState rotated = rotate_ensemble(lossy, ensemble, spec);

  std::map<std::pair<int, int>, double> probs;
  for (const auto& [key, amp] : rotated.terms()) probs[occupation_pair(key, ensemble)] += std::norm(amp);
  std::vector<std::pair<int, int>> combos;
  std::vector<double> weights;
  for (const auto& [occ, p] : probs) {
    combos.push_back(occ);
    weights.push_back(p);
  }
  size_t idx = rng.pick(weights);
  auto [n_h, n_v] = combos[idx];
  SparseState collapsed = project_occupation(rotated, ensemble, n_h, n_v);
  collapsed = scaled(collapsed, 1.0 / std::sqrt(collapsed.norm_sq()));
  return {ClickOutcome{ensemble, n_h, n_v}, std::move(collapsed)};
}

PostselectResult postselect_single(const BranchMixture& mix, const std::vector<int>& ensembles,
                                   double eta) {
  BranchMixture damped = mix;
  for (ModeId mode : ensemble_modes(ensembles)) damped = damp_mode_exact(damped, mode, eta);
  std::vector<Branch> raw;
  double acceptance = 0.0;
  for (const auto& br : damped.branches()) {
    SparseState kept = project_single(br.state, ensembles);
    acceptance += br.weight * kept.norm_sq();
    raw.push_back(Branch{br.weight, std::move(kept)});
  }
  PostselectResult result;
  result.acceptance = acceptance;
  result.posterior = renormalized(canonical_merged(std::move(raw)));
  return result;
}

PostselectResult postselect_single(const SparseState& state, const std::vector<int>& ensembles,
                                   double eta) {
  return postselect_single(BranchMixture::single(state), ensembles, eta);
}

}  // namespace ghzsim
