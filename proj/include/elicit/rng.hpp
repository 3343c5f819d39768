#pragma once

#include <cstdint>
#include <random>
#include <span>

#include "elicit/error.hpp"

namespace elicit {

/// Deterministic random stream. Every stream is identified by its seed;
/// fork(tag) derives an independent stream from (seed, tag) without touching
/// the parent's position, so named sub-streams can be replayed in isolation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), gen_(mix(seed, 0x1d8af066u)) {}

  Rng fork(std::uint64_t tag) const { return Rng(mix(seed_, tag)); }

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return gen_(); }

  // uniform in [0, 1), 53-bit resolution
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // uniform in [0, n), unbiased
  std::size_t uniform_below(std::size_t n) {
    if (n == 0) throw Error(Errc::InvalidArgument, "uniform_below: n must be positive");
    const std::uint64_t span = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = (UINT64_MAX / span) * span;
    std::uint64_t x = next_u64();
    while (x >= limit) x = next_u64();
    return static_cast<std::size_t>(x % span);
  }

  // index drawn with probability proportional to weights[i]
  std::size_t pick_weighted(std::span<const double> weights) {
    if (weights.empty()) throw Error(Errc::InvalidArgument, "pick_weighted: empty weights");
    double total = 0.0;
    for (double w : weights) total += w;
    double u = uniform01() * total;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
      u -= weights[i];
      if (u < 0.0) return i;
    }
    return weights.size() - 1;
  }

 private:
  static std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  static std::uint64_t mix(std::uint64_t seed, std::uint64_t tag) {
    return splitmix64(seed ^ splitmix64(tag + 0x632be59bd9b4e019ULL));
  }

  std::uint64_t seed_;
  std::mt19937_64 gen_;
};

}  // namespace elicit
