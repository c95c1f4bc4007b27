#pragma once

#include <cstdint>

namespace ghzsim {

// Photon-count cutoff per bosonic mode. The pair-factor construction can put
// at most two excitations on one ensemble (one through its own h mode, one
// through the predecessor link's v mode), and a two-mode rotation never
// raises the total, so 2 is exact for this protocol rather than a truncation.
inline constexpr int kPhotonCutoff = 2;

enum class Pol : uint8_t { H = 0, V = 1 };

// Ensembles are numbered 1..n; each carries an H and a V bosonic mode.
struct ModeId {
  int ensemble = 1;
  Pol pol = Pol::H;
};

// Flat mode layout, fixed so serialized states stay portable:
//   flat = 2 * (ensemble - 1) + (0 for H, 1 for V)
inline int flat_mode_index(ModeId m) {
  return 2 * (m.ensemble - 1) + static_cast<int>(m.pol);
}

inline ModeId mode_h(int ensemble) { return {ensemble, Pol::H}; }
inline ModeId mode_v(int ensemble) { return {ensemble, Pol::V}; }

// Cyclic successor: ensemble n+1 wraps to 1. The wrap-around convention
// lives here and nowhere else.
inline int next_ensemble(int i, int n) { return i == n ? 1 : i + 1; }

}  // namespace ghzsim
