#pragma once

#include "gmcr/core.hpp"
#include "gmcr/invariants.hpp"

#include <optional>
#include <span>
#include <vector>

namespace gmcr {

// All three predicates place the threshold as +-bound/c, matching the
// residual test residual <= 1/c^2. With c = 1 this is the usual +-bound.

struct RotMeasurement {
  std::size_t tim_index;
  Vec3 a_dir;
  Vec3 b_dir;
  double gamma;  // cone half-angle in [0, pi]
};

struct TransMeasurement {
  std::size_t corr_index;
  Vec3 t;  // b_i - s R a_i
  double beta;
};

enum class RotationTestMode {
  tight,       // |phi_a - phi_b| <= gamma_i + gamma_k
  paper_band,  // zone-based band, min(gamma_i + 3 gamma_k, gamma_k + 3 gamma_i)
};

/// True iff the intervals s +- alpha/c of both measurements intersect.
bool scale_consensus(const ScaleMeasurement& k, const ScaleMeasurement& j,
                     const InlierThreshold& c);

/// Half-angle of the cone of directions R a_bar may take around b_bar so
/// that |b_bar - s R a_bar| <= delta/c. Empty when no rotation admits the
/// TIM at this scale.
std::optional<double> rotation_gamma(const Tim& tim, double s_hat, const InlierThreshold& c);

std::optional<RotMeasurement> make_rot_measurement(const Tim& tim, std::size_t tim_index,
                                                   double s_hat, const InlierThreshold& c);

bool rotation_consensus(const RotMeasurement& i, const RotMeasurement& k,
                        RotationTestMode mode = RotationTestMode::tight);

std::vector<TransMeasurement> translation_measurements(std::span<const Correspondence> corrs,
                                                       std::span<const std::size_t> indices,
                                                       double s_hat, const Rotation& r_hat);
/// Every correspondence, indices 0..n-1.
std::vector<TransMeasurement> translation_measurements(std::span<const Correspondence> corrs,
                                                       double s_hat, const Rotation& r_hat);

/// True iff the spheres of radius beta/c around both centers overlap.
bool translation_consensus(const TransMeasurement& i, const TransMeasurement& j,
                           const InlierThreshold& c);

}  // namespace gmcr
