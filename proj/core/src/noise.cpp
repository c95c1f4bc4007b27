#include "ghzsim/noise.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ghzsim {

namespace {

double binomial(int n, int k) {
  double r = 1.0;
  for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
  return r;
}

// Rotates the global phase so the largest-magnitude amplitude (ties broken
// by smallest key) is real and positive.
SparseState phase_fixed(const SparseState& state) {
  const OccupationKey* best_key = nullptr;
  Amplitude best_amp{0.0, 0.0};
  for (const auto& key : state.sorted_keys()) {
    Amplitude amp = state.amplitude(key);
    if (best_key == nullptr || std::abs(amp) > std::abs(best_amp) + 1e-15) {
      best_key = &key;
      best_amp = amp;
    }
  }
  // sorted_keys() returns by value; re-fetch through the state to stay safe.
  double mag = std::abs(best_amp);
  if (mag == 0.0) return state;
  return scaled(state, std::conj(best_amp) / mag);
}

double l2_distance_sq(const SparseState& a, const SparseState& b) {
  double total = 0.0;
  for (const auto& [key, amp] : a.terms()) total += std::norm(amp - b.amplitude(key));
  for (const auto& [key, amp] : b.terms())
    if (a.amplitude(key) == Amplitude{0.0, 0.0}) total += std::norm(amp);
  return total;
}

// Deterministic strict ordering of canonical states, for stable output.
bool state_less(const SparseState& a, const SparseState& b) {
  auto ka = a.sorted_keys(), kb = b.sorted_keys();
  if (ka != kb) return ka < kb;
  for (const auto& key : ka) {
    Amplitude va = a.amplitude(key), vb = b.amplitude(key);
    if (va.real() != vb.real()) return va.real() < vb.real();
    if (va.imag() != vb.imag()) return va.imag() < vb.imag();
  }
  return false;
}

// One Kraus branch of amplitude damping: lose exactly k photons on `flat`.
// Returns the unnormalized image; its squared norm is the branch probability.
SparseState kraus_lose_k(const SparseState& state, int flat, int k, double eta) {
  SparseState out(state.mode_count());
  for (const auto& [key, amp] : state.terms()) {
    int m = key[flat];
    if (m < k) continue;
    double w = binomial(m, k) * std::pow(1.0 - eta, m - k) * std::pow(eta, k);
    if (w == 0.0) continue;
    OccupationKey dropped = key;
    dropped[flat] = static_cast<uint8_t>(m - k);
    out.accumulate(dropped, amp * std::sqrt(w));
  }
  return out;
}

int max_occupation(const SparseState& state, int flat) {
  int m = 0;
  for (const auto& [key, amp] : state.terms()) m = std::max(m, static_cast<int>(key[flat]));
  return m;
}

void check_eta(double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("loss probability must be in [0, 1]");
}

}  // namespace

BranchMixture BranchMixture::single(SparseState state) {
  return canonical_merged({Branch{1.0, std::move(state)}});
}

double BranchMixture::total_weight() const {
  double total = 0.0;
  for (const auto& b : branches_) total += b.weight;
  return total;
}

BranchMixture canonical_merged(std::vector<Branch> raw, double tol) {
  std::vector<Branch> cooked;
  for (auto& br : raw) {
    if (br.weight <= tol) continue;
    double nsq = br.state.norm_sq();
    if (nsq < tol * tol) continue;
    Branch c;
    c.weight = br.weight * nsq;
    c.state = phase_fixed(pruned(scaled(br.state, 1.0 / std::sqrt(nsq))));
    bool merged = false;
    for (auto& existing : cooked) {
      if (l2_distance_sq(existing.state, c.state) <= tol * tol) {
        existing.weight += c.weight;
        merged = true;
        break;
      }
    }
    if (!merged) cooked.push_back(std::move(c));
  }
  std::sort(cooked.begin(), cooked.end(), [](const Branch& a, const Branch& b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    return state_less(a.state, b.state);
  });
  BranchMixture mix;
  mix.branches_ = std::move(cooked);
  return mix;
}

BranchMixture mixture_from_canonical(std::vector<Branch> branches) {
  BranchMixture mix;
  mix.branches_ = std::move(branches);
  return mix;
}

BranchMixture renormalized(const BranchMixture& mix) {
  double total = mix.total_weight();
  if (total <= 0.0) return mix;
  std::vector<Branch> raw;
  raw.reserve(mix.size());
  for (const auto& br : mix.branches()) raw.push_back(Branch{br.weight / total, br.state});
  return canonical_merged(std::move(raw));
}

bool approx_equal(const BranchMixture& a, const BranchMixture& b, double tol) {
  if (a.size() != b.size()) return false;
  // Canonical order may differ when weights are nearly tied, so match greedily.
  std::vector<bool> used(b.size(), false);
  for (const auto& ba : a.branches()) {
    bool found = false;
    for (size_t j = 0; j < b.size(); ++j) {
      if (used[j]) continue;
      const auto& bb = b.branches()[j];
      if (std::abs(ba.weight - bb.weight) <= tol &&
          l2_distance_sq(ba.state, bb.state) <= tol * tol) {
        used[j] = true;
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

double mixture_fidelity(const BranchMixture& mix, const SparseState& target) {
  double nt = norm(target);
  if (std::abs(nt - 1.0) > kFidelityNormSlack)
    throw std::invalid_argument("mixture_fidelity: target must be normalized");
  double total = 0.0;
  for (const auto& br : mix.branches())
    total += br.weight * std::norm(inner_product(target, br.state));
  return total;
}

double vacuum_weight(const BranchMixture& mix, const std::vector<int>& ensembles) {
  double total = 0.0;
  for (const auto& br : mix.branches())
    if (occupies_none(br.state, ensembles)) total += br.weight;
  return total;
}

BranchMixture damp_mode_exact(const SparseState& state, ModeId mode, double eta) {
  return damp_mode_exact(BranchMixture::single(state), mode, eta);
}

BranchMixture damp_mode_exact(const BranchMixture& mix, ModeId mode, double eta) {
  check_eta(eta);
  int flat = -1;
  std::vector<Branch> out;
  for (const auto& br : mix.branches()) {
    if (flat < 0) {
      flat = flat_mode_index(mode);
      if (flat < 0 || flat >= br.state.mode_count())
        throw std::invalid_argument("damp_mode_exact: mode index out of range");
    }
    int m_max = max_occupation(br.state, flat);
    if (eta == 0.0 || m_max == 0) {
      out.push_back(Branch{br.weight, kraus_lose_k(br.state, flat, 0, eta)});
      continue;
    }
    for (int k = 0; k <= m_max; ++k)
      out.push_back(Branch{br.weight, kraus_lose_k(br.state, flat, k, eta)});
  }
  return canonical_merged(std::move(out));
}

BranchMixture damp_all_exact(const SparseState& state, double eta) {
  check_eta(eta);
  BranchMixture mix = BranchMixture::single(state);
  for (int flat = 0; flat < state.mode_count(); ++flat) {
    ModeId mode{flat / 2 + 1, static_cast<Pol>(flat % 2)};
    mix = damp_mode_exact(mix, mode, eta);
  }
  return mix;
}

std::pair<SparseState, LossRecord> damp_modes_sample(const SparseState& state,
                                                     const std::vector<ModeId>& modes, double eta,
                                                     TrialRng& rng) {
  check_eta(eta);
  LossRecord record;
  record.lost_per_mode.assign(static_cast<size_t>(state.mode_count()), 0);
  SparseState current = state;
  for (ModeId mode : modes) {
    int flat = flat_mode_index(mode);
    if (flat < 0 || flat >= state.mode_count())
      throw std::invalid_argument("damp_modes_sample: mode index out of range");
    int m_max = max_occupation(current, flat);
    if (m_max == 0 || eta == 0.0) continue;
    std::vector<double> weights(static_cast<size_t>(m_max) + 1, 0.0);
    std::vector<SparseState> images;
    images.reserve(weights.size());
    for (int k = 0; k <= m_max; ++k) {
      SparseState img = kraus_lose_k(current, flat, k, eta);
      weights[static_cast<size_t>(k)] = img.norm_sq();
      images.push_back(std::move(img));
    }
    size_t k = rng.pick(weights);
    record.lost_per_mode[static_cast<size_t>(flat)] += static_cast<int>(k);
    record.total_lost += static_cast<int>(k);
    current = scaled(images[k], 1.0 / std::sqrt(weights[k]));
  }
  return {std::move(current), std::move(record)};
}

std::pair<SparseState, LossRecord> damp_sample(const SparseState& state, double eta,
                                               TrialRng& rng) {
  std::vector<ModeId> modes;
  modes.reserve(static_cast<size_t>(state.mode_count()));
  for (int flat = 0; flat < state.mode_count(); ++flat)
    modes.push_back(ModeId{flat / 2 + 1, static_cast<Pol>(flat % 2)});
  return damp_modes_sample(state, modes, eta, rng);
}

}  // namespace ghzsim
