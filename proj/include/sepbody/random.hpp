#pragma once

#include <cstdint>
#include <random>

namespace sepbody {

/// Seedable stream used by all samplers. Replication k of an experiment with
/// master seed s draws from substream(s, k), so results do not depend on how
/// replications are scheduled across threads.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  static Rng substream(std::uint64_t seed, std::uint64_t index, std::uint64_t salt = 0);

  std::uint64_t next() { return engine_(); }
  /// Uniform on [0,1) with 53 random bits.
  double uniform();
  /// Uniform on (0,1).
  double uniform_open();
  /// Poisson variate: inversion below mean 30, transformed rejection (PTRS) above.
  std::uint64_t poisson(double mean);

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace sepbody
