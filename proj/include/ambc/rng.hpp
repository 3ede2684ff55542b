#pragma once
// Counter-based pseudo-random primitives. Every consumer derives a fresh key
// from hierarchical indices (seed -> grid point -> block -> slot -> sample),
// so parallel Monte Carlo trials are reproducible independent of scheduling
// and a sample's value never depends on how many values were drawn before it.

#include <cmath>
#include <cstdint>
#include <numbers>

namespace ambc::rng {

/// 64-bit avalanche finalizer (splitmix64 style).
inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

/// Derives a child key from a parent key and an index. Chain calls to key
/// nested structures.
inline std::uint64_t derive(std::uint64_t parent, std::uint64_t index) {
  return mix64(parent ^ (0x9e3779b97f4a7c15ULL * (index + 0x632be59bd9b4e019ULL)));
}

inline std::uint64_t derive2(std::uint64_t parent, std::uint64_t a,
                             std::uint64_t b) {
  return derive(derive(parent, a), b);
}

/// Sequential generator seeded by a derived key.
class Stream {
 public:
  explicit Stream(std::uint64_t key) : state_(key) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

  /// Uniform draw in the open interval (0, 1); never returns an endpoint, so
  /// log() of the result is always finite.
  double next_uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Two independent standard normal draws (Box-Muller).
  void next_normal_pair(double& z0, double& z1) {
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi_v<double> * u2;
    z0 = r * std::cos(t);
    z1 = r * std::sin(t);
  }

 private:
  std::uint64_t state_;
};

}  // namespace ambc::rng
