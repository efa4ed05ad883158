#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace manetcert {

/// SplitMix64 step; used to derive independent sub-stream seeds so that,
/// e.g., mobility draws never perturb scenario setup draws.
constexpr uint64_t splitmix64(uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Mixes a seed with a salt into a fresh sub-seed.
constexpr uint64_t mix_seed(uint64_t seed, uint64_t salt) {
  uint64_t s = seed ^ (salt * 0x9e3779b97f4a7c15ULL);
  return splitmix64(s);
}

/// Deterministic RNG. All value mappings are hand-rolled from raw 64-bit
/// outputs; std::uniform_*_distribution is avoided because its output is
/// implementation-defined and would tie traces to one standard library.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  uint64_t next_u64() { return gen_(); }

  /// Uniform in [0, 1) with 53-bit resolution.
  double next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * next_unit();
  }

  /// Uniform integer in [0, n). n must be > 0.
  uint32_t below(uint32_t n) {
    return static_cast<uint32_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  /// Fisher-Yates shuffle with deterministic draws.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = below(static_cast<uint32_t>(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace manetcert
