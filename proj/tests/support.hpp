// Shared fixtures and independent oracles for the test binaries.
#pragma once

#include "gmcr/core.hpp"
#include "gmcr/graph.hpp"
#include "gmcr/rng.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <vector>

namespace gmcr::testing {

inline ConsensusGraph random_graph(std::size_t n, double p, Rng& rng) {
  ConsensusGraph g(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (rng.uniform() < p) g.add_edge(i, j);
  return g;
}

inline ConsensusGraph complete_graph(std::size_t n) {
  ConsensusGraph g(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) g.add_edge(i, j);
  return g;
}

// Rotation built through Eigen's own quaternion path, independent of
// Rotation::from_quaternion.
inline Rotation eigen_random_rotation(Rng& rng) {
  Eigen::Quaterniond q(rng.normal(), rng.normal(), rng.normal(), rng.normal());
  q.normalize();
  return Rotation(q.toRotationMatrix());
}

inline Vec3 random_unit(Rng& rng) { return rng.normal_vec3().normalized(); }

inline Similarity random_similarity(Rng& rng) {
  return Similarity(rng.uniform(1.0, 5.0), eigen_random_rotation(rng),
                    Vec3(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)));
}

// Noiseless correspondences b = s R a + t on random points in the unit cube.
inline std::vector<Correspondence> exact_correspondences(const Similarity& t, std::size_t n, Rng& rng,
                                                         double beta = 0.02) {
  std::vector<Correspondence> out;
  for (std::size_t k = 0; k < n; ++k) {
    const Vec3 a(rng.uniform(), rng.uniform(), rng.uniform());
    out.emplace_back(a, t.s * (t.r.matrix() * a) + t.t, beta);
  }
  return out;
}

// Rotation angle from the quaternion double cover: 2 atan2(|v|, |w|).
inline double quaternion_angle(const Mat3& m) {
  const Eigen::Quaterniond q(m);
  return 2.0 * std::atan2(q.vec().norm(), std::abs(q.w()));
}

}  // namespace gmcr::testing
