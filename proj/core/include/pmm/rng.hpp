#pragma once

#include <cstdint>
#include <cmath>

namespace pmm {

// Counter-based random stream built on the SplitMix64 finalizer. Every draw
// is a pure function of (seed, step, coordinate), so trajectories are
// reproducible bit-for-bit regardless of draw order, platform word size or
// library version. Discrete sampling uses only IEEE adds and compares;
// Gaussian sampling uses the Box-Muller transform of two uniform draws.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : seed_(seed) {}

  // steps are 1-based times; coordinates distinguish draws within one step
  std::uint64_t bits(std::uint64_t step, std::uint64_t coord) const {
    return mix(seed_ ^ mix(step * 0x9E3779B97F4A7C15ull + coord * 0xD1B54A32D192ED03ull + 0x632BE59BD9B4E019ull));
  }

  // uniform in [0,1) with 53 random bits
  double uniform(std::uint64_t step, std::uint64_t coord) const {
    return static_cast<double>(bits(step, coord) >> 11) * 0x1.0p-53;
  }

  // standard normal pair from coordinates (coord, coord+1)
  void normal_pair(std::uint64_t step, std::uint64_t coord, double& z0, double& z1) const {
    // u0 nudged away from 0 so log is finite
    const double u0 = (static_cast<double>(bits(step, coord) >> 11) + 0.5) * 0x1.0p-53;
    const double u1 = uniform(step, coord + 1);
    const double radius = std::sqrt(-2.0 * std::log(u0));
    const double angle = 6.283185307179586476925286766559 * u1;
    z0 = radius * std::cos(angle);
    z1 = radius * std::sin(angle);
  }

  std::uint64_t seed() const { return seed_; }

  // fixed derivation for per-trial sub-streams (falsifier, experiments)
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t index) {
    return mix(seed ^ mix(index + 0x7F4A7C15ull));
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
};

}  // namespace pmm
