#include "support.hpp"

#include "gmcr/core.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace gmcr;
using gmcr::testing::eigen_random_rotation;
using gmcr::testing::random_similarity;
using gmcr::testing::random_unit;

TEST_CASE("apply: identity and axis-aligned cases") {
  CHECK(apply(Similarity::identity(), Vec3(1, 2, 3)) == Vec3(1, 2, 3));
  const Similarity t(2.0, Rotation::identity(), Vec3(1, 0, 0));
  CHECK(apply(t, Vec3(1, 0, 0)) == Vec3(3, 0, 0));
}

TEST_CASE("apply matches an explicitly composed homogeneous matrix") {
  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const Similarity t = random_similarity(rng);
    Eigen::Matrix4d h = Eigen::Matrix4d::Identity();
    h.topLeftCorner<3, 3>() = t.s * t.r.matrix();
    h.topRightCorner<3, 1>() = t.t;
    const Vec3 p = rng.normal_vec3();
    const Eigen::Vector4d ph = h * p.homogeneous();
    CHECK((apply(t, p) - ph.head<3>()).norm() < 1e-12);
  }
}

TEST_CASE("residual examples") {
  Rng rng(3);
  const Similarity t = random_similarity(rng);
  const Vec3 a(0.3, -0.2, 0.9);
  const Vec3 b = apply(t, a);
  CHECK(residual(Correspondence(a, b, 0.07), t) == doctest::Approx(0.0).epsilon(1e-24));
  const double beta = 0.05;
  const Vec3 v = random_unit(rng);
  CHECK(residual(Correspondence(a, b + beta * v, beta), t) == doctest::Approx(1.0).epsilon(1e-12));

  for (int trial = 0; trial < 100; ++trial) {
    const Similarity u = random_similarity(rng);
    const Correspondence c(rng.normal_vec3(), rng.normal_vec3(), rng.uniform(0.01, 0.5));
    const Vec3 d = c.b - u.s * (u.r.matrix() * c.a) - u.t;
    const double direct = d.squaredNorm() / (c.beta * c.beta);
    CHECK(std::abs(residual(c, u) - direct) <= 1e-12 * std::max(1.0, direct));
  }
}

TEST_CASE("consensus_set examples") {
  Rng rng(5);
  const Similarity t = random_similarity(rng);
  auto corrs = gmcr::testing::exact_correspondences(t, 12, rng);
  const InlierThreshold c(1.0);
  CHECK(consensus_set(corrs, t, c).size() == 12);

  corrs[4] = Correspondence(corrs[4].a, corrs[4].b + 10 * corrs[4].beta * random_unit(rng), corrs[4].beta);
  const auto set = consensus_set(corrs, t, c);
  CHECK(set.size() == 11);
  CHECK(std::find(set.begin(), set.end(), 4u) == set.end());

  for (auto& x : corrs) x = Correspondence(x.a, x.b + 0.03 * rng.normal_vec3(), x.beta);
  std::vector<std::size_t> oracle;
  for (std::size_t k = 0; k < corrs.size(); ++k)
    if (residual(corrs[k], t) <= c.residual_bound()) oracle.push_back(k);
  CHECK(consensus_set(corrs, t, c) == oracle);
}

TEST_CASE("consensus_set is monotone in c") {
  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const Similarity t = random_similarity(rng);
    auto corrs = gmcr::testing::exact_correspondences(t, 30, rng);
    for (auto& x : corrs) x = Correspondence(x.a, x.b + 0.02 * rng.normal_vec3(), x.beta);
    const double c2 = rng.uniform(0.2, 2.0);
    const double c1 = c2 * rng.uniform(1.0, 3.0);
    const auto strict = consensus_set(corrs, t, InlierThreshold(c1));
    const auto loose = consensus_set(corrs, t, InlierThreshold(c2));
    CHECK(std::includes(loose.begin(), loose.end(), strict.begin(), strict.end()));
  }
}

TEST_CASE("angle_between") {
  CHECK(angle_between(Vec3(1, 0, 0), Vec3(1, 0, 0)) == 0.0);
  CHECK(angle_between(Vec3(1, 0, 0), Vec3(0, 1, 0)) == doctest::Approx(std::numbers::pi / 2));
  CHECK_THROWS_AS(angle_between(Vec3::Zero(), Vec3(1, 0, 0)), DegenerateGeometry);

  Rng rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const Vec3 u = random_unit(rng);
    const Vec3 axis = u.cross(random_unit(rng)).normalized();
    const Vec3 v = Eigen::AngleAxisd(1e-8, axis) * u;
    // Extended-precision reference on the same double inputs.
    using LD = long double;
    const LD cx = LD(u.y()) * v.z() - LD(u.z()) * v.y();
    const LD cy = LD(u.z()) * v.x() - LD(u.x()) * v.z();
    const LD cz = LD(u.x()) * v.y() - LD(u.y()) * v.x();
    const LD dot = LD(u.x()) * v.x() + LD(u.y()) * v.y() + LD(u.z()) * v.z();
    const LD ref = std::atan2(std::sqrt(cx * cx + cy * cy + cz * cz), dot);
    CHECK(std::abs((angle_between(u, v) - static_cast<double>(ref)) / static_cast<double>(ref)) < 1e-3);
  }
}

TEST_CASE("geodesic_rotation_error") {
  Rng rng(4);
  const Rotation r = eigen_random_rotation(rng);
  CHECK(geodesic_rotation_error(r, r) == doctest::Approx(0.0).epsilon(1e-7));
  CHECK(geodesic_rotation_error(Rotation::from_axis_angle(random_unit(rng), 0.3), Rotation::identity()) ==
        doctest::Approx(0.3).epsilon(1e-12));

  for (int trial = 0; trial < 200; ++trial) {
    const Rotation a = eigen_random_rotation(rng);
    const Rotation b = eigen_random_rotation(rng);
    const double oracle = gmcr::testing::quaternion_angle(a.matrix().transpose() * b.matrix());
    CHECK(std::abs(geodesic_rotation_error(a, b) - oracle) < 1e-9);
  }
}

TEST_CASE("geodesic error of R against R*A equals the angle of A") {
  Rng rng(17);
  for (int trial = 0; trial < 500; ++trial) {
    const Rotation r = eigen_random_rotation(rng);
    const double angle = rng.uniform(0.01, std::numbers::pi - 0.01);
    const Rotation a = Rotation::from_axis_angle(random_unit(rng), angle);
    CHECK(std::abs(geodesic_rotation_error(r, r * a) - angle) < 1e-9);
  }
}

TEST_CASE("axis-angle rotations are in SO(3)") {
  Rng rng(2);
  for (int trial = 0; trial < 1000; ++trial) {
    const Rotation r = Rotation::from_axis_angle(rng.normal_vec3(), rng.uniform(-10.0, 10.0));
    const Mat3& m = r.matrix();
    CHECK((m.transpose() * m - Mat3::Identity()).norm() < 1e-9);
    CHECK(std::abs(m.determinant() - 1.0) < 1e-9);
  }
  CHECK_THROWS_AS(Rotation::from_axis_angle(Vec3::Zero(), 0.5), DegenerateGeometry);
}

TEST_CASE("Rotation rejects improper and non-orthogonal matrices") {
  Mat3 mirror = Mat3::Identity();
  mirror(2, 2) = -1;
  CHECK_THROWS_AS(Rotation{mirror}, InvalidInput);
  CHECK_THROWS_AS(Rotation{Mat3(2.0 * Mat3::Identity())}, InvalidInput);
}

TEST_CASE("quaternion round trip") {
  Rng rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    const Rotation r = eigen_random_rotation(rng);
    const auto q = r.quaternion();
    CHECK(q[0] >= 0.0);
    const Rotation back = Rotation::from_quaternion(q[0], q[1], q[2], q[3]);
    CHECK((back.matrix() - r.matrix()).norm() < 1e-12);
  }
}

TEST_CASE("residual is invariant under a common rigid motion with conjugated transform") {
  Rng rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    const Similarity t = random_similarity(rng);
    const Rotation rg = eigen_random_rotation(rng);
    const Vec3 tg = rng.normal_vec3();
    const Correspondence c(rng.normal_vec3(), rng.normal_vec3(), rng.uniform(0.01, 0.2));
    const Correspondence moved(rg * c.a + tg, rg * c.b + tg, c.beta);
    const Rotation rc = rg * t.r * rg.transpose();
    const Similarity conj(t.s, rc, rg * t.t + tg - t.s * (rc * tg));
    const double r0 = residual(c, t);
    CHECK(std::abs(residual(moved, conj) - r0) <= 1e-9 * std::max(1.0, r0));
  }
}

TEST_CASE("add_error") {
  Rng rng(12);
  std::vector<Vec3> pts;
  for (int k = 0; k < 100; ++k) pts.push_back(rng.normal_vec3());
  const Similarity t = random_similarity(rng);
  CHECK(add_error(t, t, pts) == 0.0);
  const Similarity shifted(t.s, t.r, t.t + Vec3(0.1, 0, 0));
  CHECK(add_error(shifted, t, pts) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK_THROWS_AS(add_error(t, t, std::span<const Vec3>{}), InvalidInput);

  const Similarity u = random_similarity(rng);
  double sum = 0.0;
  for (const auto& p : pts) sum += ((u.s * (u.r.matrix() * p) + u.t) - (t.s * (t.r.matrix() * p) + t.t)).norm();
  CHECK(std::abs(add_error(u, t, pts) - sum / 100.0) < 1e-12);
}

TEST_CASE("value types validate their invariants") {
  CHECK_THROWS_AS(Similarity(0.0, Rotation(), Vec3::Zero()), InvalidInput);
  CHECK_THROWS_AS(Similarity(-1.0, Rotation(), Vec3::Zero()), InvalidInput);
  CHECK_THROWS_AS(Correspondence(Vec3::Zero(), Vec3::Zero(), 0.0), InvalidInput);
  CHECK_THROWS_AS(Correspondence(Vec3(NAN, 0, 0), Vec3::Zero(), 0.1), InvalidInput);
  CHECK_THROWS_AS(InlierThreshold(0.0), InvalidInput);
  CHECK(InlierThreshold(2.0).residual_bound() == 0.25);
}
