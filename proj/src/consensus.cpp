#include "gmcr/consensus.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gmcr {

bool scale_consensus(const ScaleMeasurement& k, const ScaleMeasurement& j,
                     const InlierThreshold& c) {
  const double ci = c.inv();
  // written as the two endpoint comparisons so the result is symmetric bitwise
  return (k.s - k.alpha * ci <= j.s + j.alpha * ci) && (j.s - j.alpha * ci <= k.s + k.alpha * ci);
}

std::optional<double> rotation_gamma(const Tim& tim, double s_hat, const InlierThreshold& c) {
  if (!(s_hat > 0.0)) throw InvalidInput("rotation_gamma: scale must be > 0");
  const double na = s_hat * tim.a_bar.norm();
  const double nb = tim.b_bar.norm();
  if (!(na > 0.0) || !(nb > 0.0)) throw DegenerateGeometry("rotation_gamma: zero-norm TIM");
  const double r = tim.delta * c.inv();
  if (r < std::abs(nb - na)) return std::nullopt;
  const double cosg = (nb * nb + na * na - r * r) / (2.0 * na * nb);
  return std::acos(std::clamp(cosg, -1.0, 1.0));
}

std::optional<RotMeasurement> make_rot_measurement(const Tim& tim, std::size_t tim_index,
                                                   double s_hat, const InlierThreshold& c) {
  const auto gamma = rotation_gamma(tim, s_hat, c);
  if (!gamma) return std::nullopt;
  return RotMeasurement{tim_index, tim.a_bar.normalized(), tim.b_bar.normalized(), *gamma};
}

bool rotation_consensus(const RotMeasurement& i, const RotMeasurement& k, RotationTestMode mode) {
  const double phi_a = angle_between(i.a_dir, k.a_dir);
  const double phi_b = angle_between(i.b_dir, k.b_dir);
  const double gap = std::abs(phi_a - phi_b);
  if (mode == RotationTestMode::tight) return gap <= i.gamma + k.gamma;
  return gap <= std::min(i.gamma + 3.0 * k.gamma, k.gamma + 3.0 * i.gamma);
}

std::vector<TransMeasurement> translation_measurements(std::span<const Correspondence> corrs,
                                                       std::span<const std::size_t> indices,
                                                       double s_hat, const Rotation& r_hat) {
  std::vector<TransMeasurement> out;
  out.reserve(indices.size());
  for (std::size_t idx : indices) {
    const auto& corr = corrs[idx];
    out.push_back({idx, corr.b - s_hat * (r_hat.matrix() * corr.a), corr.beta});
  }
  return out;
}

std::vector<TransMeasurement> translation_measurements(std::span<const Correspondence> corrs,
                                                       double s_hat, const Rotation& r_hat) {
  std::vector<std::size_t> all(corrs.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return translation_measurements(corrs, all, s_hat, r_hat);
}

bool translation_consensus(const TransMeasurement& i, const TransMeasurement& j,
                           const InlierThreshold& c) {
  return (j.t - i.t).norm() <= (j.beta + i.beta) * c.inv();
}

}  // namespace gmcr
