#pragma once

#include <complex>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "ghzsim/modes.hpp"

namespace ghzsim {

using Amplitude = std::complex<double>;

// Occupation numbers over the flat mode layout, one byte per mode.
using OccupationKey = std::vector<uint8_t>;

struct OccupationKeyHash {
  size_t operator()(const OccupationKey& key) const {
    uint64_t h = 1469598103934665603ull;  // FNV-1a
    for (uint8_t b : key) {
      h ^= b;
      h *= 1099511628211ull;
    }
    return static_cast<size_t>(h);
  }
};

// Amplitudes below this magnitude are dropped when states are pruned.
inline constexpr double kAmplitudePruneThreshold = 1e-14;
// Agreement tolerance for "this state is normalized" checks.
inline constexpr double kNormTolerance = 1e-10;
// Normalization slack accepted by fidelity/overlap helpers.
inline constexpr double kFidelityNormSlack = 1e-8;

// Sparse Fock-basis vector over the 2n modes of an n-ensemble register.
// Value type: the operations in this header return new states and leave
// their inputs untouched. accumulate() exists so states can be assembled
// term by term (tests build expected states that way too).
class SparseState {
 public:
  using TermMap = std::unordered_map<OccupationKey, Amplitude, OccupationKeyHash>;

  SparseState() = default;
  explicit SparseState(int mode_count);

  int mode_count() const { return mode_count_; }
  int ensemble_count() const { return mode_count_ / 2; }
  size_t term_count() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  const TermMap& terms() const { return terms_; }
  Amplitude amplitude(const OccupationKey& key) const;

  // Adds a term; amplitudes on an existing key accumulate. Counts above the
  // photon cutoff or a key of the wrong length are rejected.
  void accumulate(const OccupationKey& key, Amplitude amp);

  double norm_sq() const;

  // Keys in lexicographic order; the canonical iteration order for
  // serialization and stable comparisons.
  std::vector<OccupationKey> sorted_keys() const;

 private:
  int mode_count_ = 0;
  TermMap terms_;
};

// |vac> of an n-ensemble register (all 2n occupation numbers zero).
SparseState vacuum(int ensemble_count);

// Creation operator on one mode: sqrt(m+1) |m+1><m|. Raising a mode past the
// cutoff is an error naming the offending key.
SparseState create(const SparseState& state, ModeId mode);

SparseState scaled(const SparseState& state, Amplitude factor);

// Sum of two states on the same register.
SparseState added(const SparseState& a, const SparseState& b);

// Tensor product; b's modes are appended after a's, so the operands act on
// disjoint mode ranges by construction.
SparseState tensor(const SparseState& a, const SparseState& b);

// Product of two creation-operator polynomials on one shared register:
// amplitudes multiply, occupations add, and a mode occupied by both sides
// picks up the bosonic sqrt(C(m+k, k)) factor. Exceeding the cutoff on any
// mode is an error. This is how pair factors assemble into chain states.
SparseState mode_product(const SparseState& a, const SparseState& b);

Amplitude inner_product(const SparseState& a, const SparseState& b);

double norm(const SparseState& state);

// state / ||state||; a zero state cannot be normalized.
SparseState normalized(const SparseState& state);

SparseState pruned(const SparseState& state, double threshold = kAmplitudePruneThreshold);

// |<a|b>|^2 for states that are already normalized (within kFidelityNormSlack).
double fidelity(const SparseState& a, const SparseState& b);

// (|H...H> + e^{i phi} |V...V>)/sqrt(2): one excitation per ensemble, all in
// the H modes or all in the V modes.
SparseState ghz_reference(int ensemble_count, double phi);

// Total photon count of `key` on the two modes of `ensemble`.
int ensemble_occupation(const OccupationKey& key, int ensemble);

// True when every listed ensemble holds exactly zero photons in every term.
bool occupies_none(const SparseState& state, const std::vector<int>& ensembles);

// Multiplies amplitudes by (-1)^{n_v} on one ensemble's v mode: the Z-type
// frame correction applied when a V click fires at a connection boundary.
SparseState phase_flip_v(const SparseState& state, int ensemble);

}  // namespace ghzsim
