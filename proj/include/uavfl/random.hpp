#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace uavfl {

// Explicit random stream. Every randomized operation takes one by reference;
// the distributions below are written out so that draws are identical across
// standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform on the open interval (0, 1).
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform index in [0, n). n must be positive.
  std::size_t index(std::size_t n);

  double normal();

  // Rayleigh distributed amplitude with the given scale parameter.
  double rayleigh(double scale);

 private:
  std::mt19937_64 engine_;
};

// Derives an independent stream seed from a master seed, a label and an index.
std::uint64_t derive_stream(std::uint64_t master_seed, std::string_view label,
                            std::uint64_t index);

}  // namespace uavfl
