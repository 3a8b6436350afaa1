#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string_view>

namespace apguard {

// Seeded generator with hand-written distributions. std::mt19937_64 has a
// standard-mandated output sequence, but the std:: distributions do not, so
// uniform/normal draws are done here to keep runs identical across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  // [0, 1) with 53 random bits.
  double uniform01();
  // [lo, hi]
  double uniform(double lo, double hi);
  // Unbiased integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  // Marsaglia polar method.
  double normal(double mean, double sd);

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

std::uint64_t splitmix64(std::uint64_t x);

// stage seed = splitmix64(splitmix64(master ^ fnv1a64(stage)) + index * golden)
std::uint64_t derive_seed(std::uint64_t master, std::string_view stage, std::uint64_t index = 0);

}  // namespace apguard
