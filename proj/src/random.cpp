#include "uavfl/random.hpp"

#include <cmath>
#include <numbers>

namespace uavfl {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::size_t Rng::index(std::size_t n) {
  // Lemire-style rejection keeps the result unbiased.
  const std::uint64_t bound = n;
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = engine_();
    if (r >= threshold) return static_cast<std::size_t>(r % bound);
  }
}

double Rng::normal() {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double Rng::rayleigh(double scale) {
  return scale * std::sqrt(-2.0 * std::log(uniform()));
}

std::uint64_t derive_stream(std::uint64_t master_seed, std::string_view label,
                            std::uint64_t index) {
  std::uint64_t h = splitmix64(master_seed);
  h = splitmix64(h ^ fnv1a(label));
  h = splitmix64(h ^ splitmix64(index + 0x632be59bd9b4e019ULL));
  return h;
}

}  // namespace uavfl
