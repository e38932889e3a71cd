#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace fedgl {

// Deterministic random stream. All randomness in the simulator flows through
// this class so runs are reproducible bit-for-bit across platforms: doubles
// are produced from raw mt19937_64 output directly instead of going through
// std distributions, whose output is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  bool bernoulli(double p) { return uniform() < p; }

  // Unbiased integer in [0, n) by rejection.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return x % n;
  }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  // k distinct values from [0, n), in random order.
  std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

  // Child stream whose seed mixes this stream's seed with the given tags,
  // so independent components (clients, rounds) get decorrelated streams
  // without consuming draws from the parent.
  static Rng derive(std::uint64_t seed, std::uint64_t tag_a, std::uint64_t tag_b = 0,
                    std::uint64_t tag_c = 0);

 private:
  std::mt19937_64 engine_;
};

// SplitMix64 finalizer; used for seed mixing.
std::uint64_t mix64(std::uint64_t x);

}  // namespace fedgl
