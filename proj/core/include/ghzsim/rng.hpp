#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace ghzsim {

// splitmix64 step; used for seeding and stream derivation.
inline uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Per-trial random stream: xoshiro256** seeded from (master_seed, stream_id)
// through splitmix64. Every trial derives its own stream, so results are
// reproducible bit-for-bit no matter how trials are distributed over worker
// threads. Distributions are inverted by hand instead of going through
// <random>, whose distribution algorithms are implementation-defined.
class TrialRng {
 public:
  TrialRng(uint64_t master_seed, uint64_t stream_id) {
    uint64_t mix = master_seed ^ (stream_id * 0xD1342543DE82EF95ull + 0x9E3779B97F4A7C15ull);
    for (auto& word : s_) word = splitmix64(mix);
  }

  uint64_t next_u64() {
    const uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform double in [0, 1), 53 significant bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  // Number of attempts until first success, support {1, 2, ...}.
  uint64_t geometric(double p) {
    if (!(p > 0.0) || p > 1.0) throw std::invalid_argument("geometric: p must be in (0, 1]");
    if (p == 1.0) return 1;
    double u = uniform();
    double k = std::floor(std::log1p(-u) / std::log1p(-p));
    if (k < 0.0) k = 0.0;
    if (k > 9.0e18) return UINT64_MAX;
    return 1 + static_cast<uint64_t>(k);
  }

  // Index sampled proportionally to the (non-negative) weights.
  size_t pick(const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    if (!(total > 0.0)) throw std::invalid_argument("pick: total weight must be positive");
    double x = uniform() * total;
    double acc = 0.0;
    for (size_t i = 0; i < weights.size(); ++i) {
      acc += weights[i];
      if (x < acc) return i;
    }
    return weights.size() - 1;
  }

 private:
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  uint64_t s_[4] = {};
};

}  // namespace ghzsim
