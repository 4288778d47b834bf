#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace stablab {

// Reproducible 64-bit generator.  The engine is std::mt19937_64, whose output
// sequence is pinned by the standard; index and real draws below deliberately
// avoid the std distribution classes, which are implementation-defined.
// Streams derived from (seed, stream) let coupled runs replay identical draw
// sequences while replicas stay decorrelated.
class Rng {
public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : engine_(mix(seed, stream)) {}

  // splitmix64 finalizer over a golden-ratio spread of the stream id
  static std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t bits() { return engine_(); }

  // Lemire multiply-shift: rejection-free bounded draw, identical on every
  // platform with 128-bit multiply support.
  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(
        (static_cast<unsigned __int128>(bits()) * n) >> 64);
  }

  // uniform over [0,1) at 53-bit resolution
  double uniform() { return static_cast<double>(bits() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Box-Muller with a cached spare; std::normal_distribution varies across
  // standard libraries, this does not.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * uniform();
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace stablab
