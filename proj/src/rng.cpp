#include "fedgl/rng.hpp"

namespace fedgl {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::vector<std::size_t> Rng::sample_without_replacement(std::size_t n, std::size_t k) {
  std::vector<std::size_t> pool(n);
  for (std::size_t i = 0; i < n; ++i) pool[i] = i;
  if (k > n) k = n;
  // Partial Fisher-Yates: after i swaps the first i slots hold the sample.
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t j = i + static_cast<std::size_t>(below(n - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

Rng Rng::derive(std::uint64_t seed, std::uint64_t tag_a, std::uint64_t tag_b,
                std::uint64_t tag_c) {
  std::uint64_t s = mix64(seed);
  s = mix64(s ^ tag_a);
  s = mix64(s ^ tag_b);
  s = mix64(s ^ tag_c);
  return Rng(s);
}

}  // namespace fedgl
