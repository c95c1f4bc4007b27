#pragma once

#include <string>

#include "ghzsim/noise.hpp"
#include "ghzsim/sparse_state.hpp"

namespace ghzsim {

/// {"mode_count": N, "entries": [{"key": [...], "re": x, "im": y}, ...]}
/// with entries in lexicographic key order. Amplitude doubles are written
/// with enough digits that parsing them back is exact.
std::string to_json(const SparseState& state, int indent = -1);
SparseState state_from_json(const std::string& text);

/// {"branches": [{"weight": w, "state": {...}}, ...]} in stored order.
/// Loading does not re-canonicalize, so a save/load cycle is bit-exact.
std::string to_json(const BranchMixture& mix, int indent = -1);
BranchMixture mixture_from_json(const std::string& text);

}  // namespace ghzsim
