#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace mlcp {

// SplitMix64 finalizer. Every random draw in the project derives from this
// one mixing function, which keeps the stream definition portable and easy
// to document.
inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derive a child seed from (seed, key), e.g. per-replication or per-method.
inline constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t key) noexcept {
  return splitmix64(splitmix64(seed) ^ splitmix64(key ^ 0xa0761d6478bd642fULL));
}

// Map 64 bits to the open interval (0, 1); never returns 0 or 1 exactly.
inline double unit_open(std::uint64_t bits) noexcept {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

// Sequential generator with an explicit draw order: one splitmix64 step per
// next_u64(), normals via Box-Muller (two uniforms each, no cached spare).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next_u64() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  double uniform() noexcept { return unit_open(next_u64()); }

  double normal(double mean = 0.0, double sd = 1.0) noexcept {
    const double u1 = uniform();
    const double u2 = uniform();
    return mean + sd * std::sqrt(-2.0 * std::log(u1)) *
                      std::cos(2.0 * std::numbers::pi * u2);
  }

  bool bernoulli(double p) noexcept { return uniform() < p; }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) noexcept { return next_u64() % n; }

 private:
  std::uint64_t state_;
};

// Counter-based uniforms addressed by (instance, layer, node). The same
// address always yields the same draw; distinct addresses are independent
// for practical purposes. Used for the tie-breaking variables of smoothed
// conformal p-values so that results are reproducible under any execution
// order.
struct RandomStream {
  std::uint64_t seed = 0;

  double uniform_at(std::uint64_t instance, std::uint64_t layer,
                    std::uint64_t node) const noexcept {
    std::uint64_t h = splitmix64(seed ^ 0x8bb84b93962eacc9ULL);
    h = splitmix64(h ^ instance);
    h = splitmix64(h ^ layer);
    h = splitmix64(h ^ node);
    return unit_open(h);
  }
};

}  // namespace mlcp
