#pragma once

#include "gmcr/core.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace gmcr {

/// Translation-invariant measurement built from correspondences i < j.
struct Tim {
  std::size_t i;
  std::size_t j;
  Vec3 a_bar;    // a_j - a_i
  Vec3 b_bar;    // b_j - b_i
  double delta;  // beta_j + beta_i
};

struct ScaleMeasurement {
  std::size_t tim_index;
  double s;      // |b_bar| / |a_bar|
  double alpha;  // delta / |a_bar|
};

/// all_pairs when `limit` is empty; otherwise at most `limit` pairs drawn
/// uniformly without replacement.
struct TimMode {
  std::optional<std::size_t> limit;
  std::uint64_t seed = 0;

  static TimMode all_pairs() { return {}; }
  static TimMode complete_limit(std::size_t k, std::uint64_t seed = 0) { return {k, seed}; }
};

inline constexpr double kDefaultMinTimNorm = 1e-6;

/// Number of unordered pairs of n items.
constexpr std::size_t pair_count(std::size_t n) { return n < 2 ? 0 : n * (n - 1) / 2; }

/// Row-major upper-triangle position of pair (i, j), i < j.
constexpr std::size_t pair_index(std::size_t i, std::size_t j, std::size_t n) {
  return i * (2 * n - i - 1) / 2 + (j - i - 1);
}

/// Parallel construction; output order is (0,1), (0,2), ..., (n-2,n-1).
std::vector<Tim> build_tims(std::span<const Correspondence> corrs, const TimMode& mode = {});
/// Single-threaded reference of build_tims.
std::vector<Tim> build_tims_serial(std::span<const Correspondence> corrs,
                                   const TimMode& mode = {});

struct ScaleMeasurements {
  std::vector<ScaleMeasurement> items;
  std::size_t dropped = 0;  // TIMs with |a_bar| < min_norm
};

ScaleMeasurements scale_measurements(std::span<const Tim> tims,
                                     double min_norm = kDefaultMinTimNorm);

}  // namespace gmcr
