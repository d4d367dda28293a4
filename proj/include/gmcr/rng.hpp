#pragma once

#include "gmcr/core.hpp"

#include <cstdint>
#include <random>

namespace gmcr {

/// Seeded generator with portable distributions. std::mt19937_64 output
/// is fixed by the standard, but the std:: distributions are not, so the
/// draws below are written out to keep instances identical across
/// standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n), n > 0.
  std::uint64_t below(std::uint64_t n);
  double normal();
  Vec3 normal_vec3() { return {normal(), normal(), normal()}; }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// splitmix64 finalizer; derives independent child seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

}  // namespace gmcr
