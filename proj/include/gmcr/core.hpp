#pragma once

#include <Eigen/Core>

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gmcr {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Raised when an input violates an operation's preconditions.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised for geometrically degenerate input (zero-length vectors,
/// collinear point sets, rank-deficient covariances).
class DegenerateGeometry : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Proper rotation matrix. Construction validates orthonormality and
/// det = +1 within 1e-9.
class Rotation {
 public:
  Rotation() : m_(Mat3::Identity()) {}
  explicit Rotation(const Mat3& m);

  static Rotation identity() { return Rotation(); }
  static Rotation from_axis_angle(const Vec3& axis, double angle);
  /// Quaternion in (w, x, y, z) order; normalized internally.
  static Rotation from_quaternion(double w, double x, double y, double z);

  const Mat3& matrix() const { return m_; }
  Vec3 operator*(const Vec3& v) const { return m_ * v; }
  Rotation operator*(const Rotation& o) const;
  Rotation transpose() const;
  /// Unit quaternion (w, x, y, z) with w >= 0.
  Eigen::Vector4d quaternion() const;

  static bool is_valid(const Mat3& m, double tol = 1e-9);

 private:
  struct Unchecked {};
  Rotation(const Mat3& m, Unchecked) : m_(m) {}
  Mat3 m_;
};

/// b = s R a + t
struct Similarity {
  double s = 1.0;
  Rotation r;
  Vec3 t = Vec3::Zero();

  Similarity() = default;
  Similarity(double scale, const Rotation& rot, const Vec3& trans);

  static Similarity identity() { return {}; }
};

struct Correspondence {
  Vec3 a;
  Vec3 b;
  double beta;  // per-pair noise bound (m)

  Correspondence(const Vec3& src, const Vec3& dst, double noise_bound);
};

/// Inlier threshold constant c; the residual test is residual <= 1/c^2.
class InlierThreshold {
 public:
  explicit InlierThreshold(double c = 1.0);
  double value() const { return c_; }
  double inv() const { return 1.0 / c_; }
  double residual_bound() const { return 1.0 / (c_ * c_); }

 private:
  double c_;
};

Vec3 apply(const Similarity& transform, const Vec3& p);

/// (1/beta^2) * ||b - sRa - t||^2
double residual(const Correspondence& corr, const Similarity& transform);

/// Indices with residual <= c^-2, ascending.
std::vector<std::size_t> consensus_set(std::span<const Correspondence> corrs,
                                       const Similarity& transform,
                                       const InlierThreshold& c);

/// Angle in [0, pi] via atan2(|u x v|, u . v).
double angle_between(const Vec3& u, const Vec3& v);

double geodesic_rotation_error(const Rotation& estimate, const Rotation& truth);

/// Mean point distance between the two transforms over `points`.
double add_error(const Similarity& estimate, const Similarity& truth,
                 std::span<const Vec3> points);

bool all_finite(const Vec3& v);

}  // namespace gmcr
