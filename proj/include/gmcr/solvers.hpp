#pragma once

#include "gmcr/consensus.hpp"
#include "gmcr/core.hpp"
#include "gmcr/graph.hpp"
#include "gmcr/invariants.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace gmcr {

/// Raised when a scale clique's intervals share no common point.
class InconsistentClique : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Midpoint of the common interval [max(s - alpha/c), min(s + alpha/c)] of
/// the clique members. `members` index into `measurements`.
double solve_scale(std::span<const ScaleMeasurement> measurements,
                   std::span<const std::size_t> members, const InlierThreshold& c);

/// Best rotation taking s_hat * a_bar onto b_bar over the member TIMs.
/// Solved through the 4x4 quaternion form, so the result is always proper.
Rotation solve_rotation_arun(std::span<const Tim> tims, std::span<const std::size_t> members,
                             double s_hat);

/// Optimal proper rotation R maximizing sum_k dst_k^T R src_k.
/// Throws DegenerateGeometry when the cross-covariance has rank < 2.
Rotation procrustes_rotation(std::span<const Vec3> src, std::span<const Vec3> dst);

/// Inverse-variance weighted mean of the member translations.
Vec3 solve_translation(std::span<const TransMeasurement> measurements,
                       std::span<const std::size_t> members);

/// Closed-form similarity: s from the RMS centroid deviations, R by
/// Procrustes, t from the centroids.
Similarity umeyama_similarity(std::span<const std::pair<Vec3, Vec3>> pairs);

struct RansacConfig {
  std::size_t max_iterations = 10000;
  double confidence = 0.99;
  std::optional<std::size_t> fixed_iterations;
  std::uint64_t seed = 0;
};

struct RansacResult {
  Similarity transform;
  std::vector<std::size_t> inliers;
  std::size_t iterations = 0;
};

/// Three-point RANSAC with adaptive stopping and a final refit on the best
/// consensus set. Degenerate samples are redrawn without using up an
/// iteration.
RansacResult ransac_register(std::span<const Correspondence> corrs, const RansacConfig& cfg,
                             const InlierThreshold& c);

/// Adaptive iteration count ln(1 - confidence) / ln(1 - w^3), at least 1.
std::size_t ransac_required_iterations(double inlier_ratio, double confidence,
                                       std::size_t cap);

}  // namespace gmcr
