#include "ghzsim/json_io.hpp"

#include <stdexcept>

#include <json.hpp>

namespace ghzsim {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json state_to_value(const SparseState& state) {
  ordered_json j;
  j["mode_count"] = state.mode_count();
  ordered_json entries = ordered_json::array();
  for (const auto& key : state.sorted_keys()) {
    Amplitude amp = state.amplitude(key);
    ordered_json entry;
    entry["key"] = std::vector<int>(key.begin(), key.end());
    entry["re"] = amp.real();
    entry["im"] = amp.imag();
    entries.push_back(std::move(entry));
  }
  j["entries"] = std::move(entries);
  return j;
}

SparseState state_from_value(const ordered_json& j) {
  if (!j.contains("mode_count") || !j.contains("entries"))
    throw std::invalid_argument("state JSON needs mode_count and entries");
  SparseState state(j.at("mode_count").get<int>());
  for (const auto& entry : j.at("entries")) {
    auto ints = entry.at("key").get<std::vector<int>>();
    OccupationKey key(ints.begin(), ints.end());
    state.accumulate(key, Amplitude{entry.at("re").get<double>(), entry.at("im").get<double>()});
  }
  return state;
}

}  // namespace

std::string to_json(const SparseState& state, int indent) {
  return state_to_value(state).dump(indent);
}

SparseState state_from_json(const std::string& text) {
  return state_from_value(ordered_json::parse(text));
}

std::string to_json(const BranchMixture& mix, int indent) {
  ordered_json j;
  ordered_json branches = ordered_json::array();
  for (const auto& br : mix.branches()) {
    ordered_json b;
    b["weight"] = br.weight;
    b["state"] = state_to_value(br.state);
    branches.push_back(std::move(b));
  }
  j["branches"] = std::move(branches);
  return j.dump(indent);
}

BranchMixture mixture_from_json(const std::string& text) {
  ordered_json j = ordered_json::parse(text);
  std::vector<Branch> branches;
  for (const auto& b : j.at("branches"))
    branches.push_back(Branch{b.at("weight").get<double>(), state_from_value(b.at("state"))});
  return mixture_from_canonical(std::move(branches));
}

}  // namespace ghzsim
