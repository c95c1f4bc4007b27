#include "ghzsim/sparse_state.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ghzsim {

namespace {

std::string key_to_string(const OccupationKey& key) {
  std::string out = "[";
  for (size_t i = 0; i < key.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(static_cast<int>(key[i]));
  }
  out += ']';
  return out;
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
  return r;
}

}  // namespace

SparseState::SparseState(int mode_count) : mode_count_(mode_count) {
  if (mode_count < 0) throw std::invalid_argument("SparseState: negative mode count");
}

Amplitude SparseState::amplitude(const OccupationKey& key) const {
  auto it = terms_.find(key);
  return it == terms_.end() ? Amplitude{0.0, 0.0} : it->second;
}

void SparseState::accumulate(const OccupationKey& key, Amplitude amp) {
  if (static_cast<int>(key.size()) != mode_count_)
    throw std::invalid_argument("accumulate: key length " + std::to_string(key.size()) +
                                " does not match mode count " + std::to_string(mode_count_));
  for (uint8_t c : key)
    if (c > kPhotonCutoff)
      throw std::invalid_argument("accumulate: key " + key_to_string(key) +
                                  " exceeds the photon cutoff");
  auto [it, inserted] = terms_.try_emplace(key, amp);
  if (!inserted) it->second += amp;
}

double SparseState::norm_sq() const {
  double total = 0.0;
  for (const auto& [key, amp] : terms_) total += std::norm(amp);
  return total;
}

std::vector<OccupationKey> SparseState::sorted_keys() const {
  std::vector<OccupationKey> keys;
  keys.reserve(terms_.size());
  for (const auto& [key, amp] : terms_) keys.push_back(key);
  std::sort(keys.begin(), keys.end());
  return keys;
}

SparseState vacuum(int ensemble_count) {
  if (ensemble_count < 1) throw std::invalid_argument("vacuum: need at least one ensemble");
  SparseState state(2 * ensemble_count);
  state.accumulate(OccupationKey(2 * ensemble_count, 0), 1.0);
  return state;
}

SparseState create(const SparseState& state, ModeId mode) {
  int flat = flat_mode_index(mode);
  if (flat < 0 || flat >= state.mode_count())
    throw std::invalid_argument("create: mode index out of range");
  SparseState out(state.mode_count());
  for (const auto& [key, amp] : state.terms()) {
    int m = key[flat];
    if (m + 1 > kPhotonCutoff)
      throw std::invalid_argument("create: raising key " + key_to_string(key) + " on mode " +
                                  std::to_string(flat) + " would exceed the photon cutoff");
    OccupationKey raised = key;
    raised[flat] = static_cast<uint8_t>(m + 1);
    out.accumulate(raised, amp * std::sqrt(static_cast<double>(m + 1)));
  }
  return out;
}

SparseState scaled(const SparseState& state, Amplitude factor) {
  SparseState out(state.mode_count());
  for (const auto& [key, amp] : state.terms()) out.accumulate(key, amp * factor);
  return out;
}

SparseState added(const SparseState& a, const SparseState& b) {
  if (a.mode_count() != b.mode_count())
    throw std::invalid_argument("added: operands live on different registers");
  SparseState out = a;
  for (const auto& [key, amp] : b.terms()) out.accumulate(key, amp);
  return out;
}

SparseState tensor(const SparseState& a, const SparseState& b) {
  SparseState out(a.mode_count() + b.mode_count());
  for (const auto& [ka, va] : a.terms()) {
    for (const auto& [kb, vb] : b.terms()) {
      OccupationKey key = ka;
      key.insert(key.end(), kb.begin(), kb.end());
      out.accumulate(key, va * vb);
    }
  }
  return out;
}

SparseState mode_product(const SparseState& a, const SparseState& b) {
  if (a.mode_count() != b.mode_count())
    throw std::invalid_argument("mode_product: operands live on different registers");
  SparseState out(a.mode_count());
  for (const auto& [ka, va] : a.terms()) {
    for (const auto& [kb, vb] : b.terms()) {
      OccupationKey key(ka.size());
      double boson = 1.0;
      for (size_t m = 0; m < ka.size(); ++m) {
        int total = ka[m] + kb[m];
        if (total > kPhotonCutoff)
          throw std::invalid_argument("mode_product: combined key " + key_to_string(ka) + " + " +
                                      key_to_string(kb) + " exceeds the photon cutoff");
        key[m] = static_cast<uint8_t>(total);
        if (ka[m] && kb[m]) boson *= binomial(total, kb[m]);
      }
      out.accumulate(key, va * vb * std::sqrt(boson));
    }
  }
  return out;
}

Amplitude inner_product(const SparseState& a, const SparseState& b) {
  if (a.mode_count() != b.mode_count())
    throw std::invalid_argument("inner_product: operands live on different registers");
  // Iterate the smaller map.
  const SparseState& small = a.term_count() <= b.term_count() ? a : b;
  const SparseState& large = a.term_count() <= b.term_count() ? b : a;
  Amplitude sum{0.0, 0.0};
  for (const auto& [key, amp] : small.terms()) {
    Amplitude other = large.amplitude(key);
    if (&small == &a)
      sum += std::conj(amp) * other;
    else
      sum += std::conj(other) * amp;
  }
  return sum;
}

double norm(const SparseState& state) { return std::sqrt(state.norm_sq()); }

SparseState normalized(const SparseState& state) {
  double n = norm(state);
  if (n < kAmplitudePruneThreshold)
    throw std::domain_error("normalized: cannot normalize a zero state");
  return scaled(state, 1.0 / n);
}

SparseState pruned(const SparseState& state, double threshold) {
  SparseState out(state.mode_count());
  for (const auto& [key, amp] : state.terms())
    if (std::abs(amp) > threshold) out.accumulate(key, amp);
  return out;
}

double fidelity(const SparseState& a, const SparseState& b) {
  double na = norm(a), nb = norm(b);
  if (std::abs(na - 1.0) > kFidelityNormSlack || std::abs(nb - 1.0) > kFidelityNormSlack)
    throw std::invalid_argument("fidelity: operands must be normalized (norms " +
                                std::to_string(na) + ", " + std::to_string(nb) + ")");
  return std::norm(inner_product(a, b));
}

SparseState ghz_reference(int ensemble_count, double phi) {
  if (ensemble_count < 1) throw std::invalid_argument("ghz_reference: need at least one ensemble");
  SparseState state(2 * ensemble_count);
  OccupationKey all_h(2 * ensemble_count, 0), all_v(2 * ensemble_count, 0);
  for (int e = 1; e <= ensemble_count; ++e) {
    all_h[flat_mode_index(mode_h(e))] = 1;
    all_v[flat_mode_index(mode_v(e))] = 1;
  }
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  state.accumulate(all_h, inv_sqrt2);
  state.accumulate(all_v, std::polar(inv_sqrt2, phi));
  return state;
}

int ensemble_occupation(const OccupationKey& key, int ensemble) {
  return key[flat_mode_index(mode_h(ensemble))] + key[flat_mode_index(mode_v(ensemble))];
}

bool occupies_none(const SparseState& state, const std::vector<int>& ensembles) {
  for (const auto& [key, amp] : state.terms())
    for (int e : ensembles)
      if (ensemble_occupation(key, e) != 0) return false;
  return true;
}

SparseState phase_flip_v(const SparseState& state, int ensemble) {
  int flat = flat_mode_index(mode_v(ensemble));
  SparseState out(state.mode_count());
  for (const auto& [key, amp] : state.terms())
    out.accumulate(key, (key[flat] % 2) ? -amp : amp);
  return out;
}

}  // namespace ghzsim
