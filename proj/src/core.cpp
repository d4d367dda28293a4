#include "gmcr/core.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>

namespace gmcr {

Rotation::Rotation(const Mat3& m) : m_(m) {
  if (!is_valid(m)) throw InvalidInput("matrix is not a proper rotation");
}

bool Rotation::is_valid(const Mat3& m, double tol) {
  if (!m.allFinite()) return false;
  const double ortho = (m.transpose() * m - Mat3::Identity()).norm();
  return ortho <= tol && std::abs(m.determinant() - 1.0) <= tol;
}

Rotation Rotation::from_axis_angle(const Vec3& axis, double angle) {
  const double n = axis.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw DegenerateGeometry("zero rotation axis");
  const Vec3 k = axis / n;
  // Rodrigues
  Mat3 kx;
  kx << 0, -k.z(), k.y(), k.z(), 0, -k.x(), -k.y(), k.x(), 0;
  const Mat3 m = Mat3::Identity() + std::sin(angle) * kx + (1.0 - std::cos(angle)) * kx * kx;
  return Rotation(m, Unchecked{});
}

Rotation Rotation::from_quaternion(double w, double x, double y, double z) {
  const double n = std::sqrt(w * w + x * x + y * y + z * z);
  if (!(n > 0.0) || !std::isfinite(n)) throw DegenerateGeometry("zero quaternion");
  w /= n;
  x /= n;
  y /= n;
  z /= n;
  Mat3 m;
  m << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
      2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
      2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
  return Rotation(m, Unchecked{});
}

Rotation Rotation::operator*(const Rotation& o) const { return Rotation(m_ * o.m_, Unchecked{}); }

Rotation Rotation::transpose() const { return Rotation(m_.transpose(), Unchecked{}); }

Eigen::Vector4d Rotation::quaternion() const {
  Eigen::Quaterniond q(m_);
  q.normalize();
  if (q.w() < 0) q.coeffs() *= -1.0;
  return {q.w(), q.x(), q.y(), q.z()};
}

Similarity::Similarity(double scale, const Rotation& rot, const Vec3& trans)
    : s(scale), r(rot), t(trans) {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw InvalidInput("similarity scale must be > 0");
  if (!all_finite(trans)) throw InvalidInput("similarity translation must be finite");
}

Correspondence::Correspondence(const Vec3& src, const Vec3& dst, double noise_bound)
    : a(src), b(dst), beta(noise_bound) {
  if (!(noise_bound > 0.0) || !std::isfinite(noise_bound))
    throw InvalidInput("correspondence noise bound must be > 0");
  if (!all_finite(src) || !all_finite(dst)) throw InvalidInput("correspondence point not finite");
}

InlierThreshold::InlierThreshold(double c) : c_(c) {
  if (!(c > 0.0) || !std::isfinite(c)) throw InvalidInput("inlier threshold c must be > 0");
}

bool all_finite(const Vec3& v) { return v.allFinite(); }

Vec3 apply(const Similarity& transform, const Vec3& p) {
  return transform.s * (transform.r.matrix() * p) + transform.t;
}

double residual(const Correspondence& corr, const Similarity& transform) {
  return (corr.b - apply(transform, corr.a)).squaredNorm() / (corr.beta * corr.beta);
}

std::vector<std::size_t> consensus_set(std::span<const Correspondence> corrs,
                                       const Similarity& transform, const InlierThreshold& c) {
  std::vector<std::size_t> out;
  const double bound = c.residual_bound();
  for (std::size_t i = 0; i < corrs.size(); ++i)
    if (residual(corrs[i], transform) <= bound) out.push_back(i);
  return out;
}

double angle_between(const Vec3& u, const Vec3& v) {
  const double nu = u.norm();
  const double nv = v.norm();
  if (!(nu > 0.0) || !(nv > 0.0)) throw DegenerateGeometry("angle_between: zero-norm vector");
  return std::atan2(u.cross(v).norm(), u.dot(v));
}

double geodesic_rotation_error(const Rotation& estimate, const Rotation& truth) {
  // Same angle as acos((tr - 1) / 2), but the sine from the skew part keeps
  // full precision near zero where acos flattens out.
  const Mat3 m = estimate.matrix().transpose() * truth.matrix();
  const Vec3 skew(m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1));
  return std::atan2(0.5 * skew.norm(), 0.5 * (m.trace() - 1.0));
}

double add_error(const Similarity& estimate, const Similarity& truth, std::span<const Vec3> points) {
  if (points.empty()) throw InvalidInput("add_error: empty point list");
  double sum = 0.0;
  for (const auto& p : points) sum += (apply(estimate, p) - apply(truth, p)).norm();
  return sum / static_cast<double>(points.size());
}

}  // namespace gmcr
