#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

namespace cfmcast {

/// Splittable counter-based random stream. Sub-streams are derived by
/// hashing (seed, tag...) tuples, so draws for one (drop, AP/UE, purpose)
/// combination never depend on how many other entities exist.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : state_(mix(seed ^ kPhi)) {}

  /// Derive an independent sub-stream keyed by an integer tag.
  [[nodiscard]] RandomStream split(std::uint64_t tag) const {
    return RandomStream(mix(state_ ^ mix(tag + kPhi)));
  }

  [[nodiscard]] RandomStream split(std::uint64_t a, std::uint64_t b) const {
    return split(a).split(b);
  }

  std::uint64_t next_u64() {
    state_ += kPhi;
    return mix(state_);
  }

  /// Uniform in (0, 1].
  double next_uniform() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller (platform-independent, unlike
  /// std::normal_distribution).
  double next_normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

  /// Standard circularly-symmetric complex normal, unit variance.
  std::complex<double> next_cnormal() {
    constexpr double inv_sqrt2 = 0.7071067811865475244;
    return {next_normal() * inv_sqrt2, next_normal() * inv_sqrt2};
  }

 private:
  static constexpr std::uint64_t kPhi = 0x9e3779b97f4a7c15ULL;

  // splitmix64 finalizer
  static std::uint64_t mix(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
  }

  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace cfmcast
