#include "gmcr/solvers.hpp"

#include "gmcr/linalg.hpp"
#include "gmcr/rng.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace gmcr {
namespace {

constexpr double kRankTol = 1e-12;  // on squared singular values, relative

void check_rank(const Mat3& cov, const char* what) {
  const auto eig = linalg::jacobi_eigen<3>(cov.transpose() * cov);
  if (!(eig.values[0] > 0.0) || eig.values[1] <= kRankTol * eig.values[0])
    throw DegenerateGeometry(what);
}

Rotation rotation_from_cross_covariance(const Mat3& s) {
  // s(x, y) = sum src_x * dst_y
  const double sxx = s(0, 0), sxy = s(0, 1), sxz = s(0, 2);
  const double syx = s(1, 0), syy = s(1, 1), syz = s(1, 2);
  const double szx = s(2, 0), szy = s(2, 1), szz = s(2, 2);
  Eigen::Matrix4d n;
  n << sxx + syy + szz, syz - szy, szx - sxz, sxy - syx,
       syz - szy, sxx - syy - szz, sxy + syx, szx + sxz,
       szx - sxz, sxy + syx, -sxx + syy - szz, syz + szy,
       sxy - syx, szx + sxz, syz + szy, -sxx - syy + szz;
  const auto eig = linalg::jacobi_eigen<4>(n);
  const Eigen::Vector4d q = eig.vectors.col(0);
  return Rotation::from_quaternion(q[0], q[1], q[2], q[3]);
}

}  // namespace

double solve_scale(std::span<const ScaleMeasurement> measurements,
                   std::span<const std::size_t> members, const InlierThreshold& c) {
  if (members.empty()) throw InvalidInput("solve_scale: empty clique");
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (std::size_t k : members) {
    const auto& m = measurements[k];
    lo = std::max(lo, m.s - m.alpha * c.inv());
    hi = std::min(hi, m.s + m.alpha * c.inv());
  }
  if (lo > hi) throw InconsistentClique("solve_scale: clique intervals do not intersect");
  return 0.5 * (lo + hi);
}

Rotation procrustes_rotation(std::span<const Vec3> src, std::span<const Vec3> dst) {
  if (src.size() != dst.size()) throw InvalidInput("procrustes_rotation: size mismatch");
  Mat3 cov = Mat3::Zero();
  for (std::size_t k = 0; k < src.size(); ++k) cov += src[k] * dst[k].transpose();
  check_rank(cov, "procrustes_rotation: rank-deficient cross-covariance");
  return rotation_from_cross_covariance(cov);
}

Rotation solve_rotation_arun(std::span<const Tim> tims, std::span<const std::size_t> members,
                             double s_hat) {
  if (members.size() < 2) throw DegenerateGeometry("solve_rotation_arun: need at least 2 TIMs");
  std::vector<Vec3> src, dst;
  src.reserve(members.size());
  dst.reserve(members.size());
  for (std::size_t k : members) {
    src.push_back(s_hat * tims[k].a_bar);
    dst.push_back(tims[k].b_bar);
  }
  return procrustes_rotation(src, dst);
}

Vec3 solve_translation(std::span<const TransMeasurement> measurements,
                       std::span<const std::size_t> members) {
  if (members.empty()) throw InvalidInput("solve_translation: empty clique");
  Vec3 num = Vec3::Zero();
  double den = 0.0;
  for (std::size_t k : members) {
    const double w = 1.0 / (measurements[k].beta * measurements[k].beta);
    num += w * measurements[k].t;
    den += w;
  }
  return num / den;
}

Similarity umeyama_similarity(std::span<const std::pair<Vec3, Vec3>> pairs) {
  if (pairs.size() < 3) throw DegenerateGeometry("umeyama_similarity: need at least 3 pairs");
  Vec3 ca = Vec3::Zero(), cb = Vec3::Zero();
  for (const auto& [a, b] : pairs) {
    ca += a;
    cb += b;
  }
  ca /= static_cast<double>(pairs.size());
  cb /= static_cast<double>(pairs.size());

  std::vector<Vec3> src, dst;
  double var_a = 0.0, var_b = 0.0;
  Mat3 scatter = Mat3::Zero();
  for (const auto& [a, b] : pairs) {
    src.push_back(a - ca);
    dst.push_back(b - cb);
    var_a += src.back().squaredNorm();
    var_b += dst.back().squaredNorm();
    scatter += src.back() * src.back().transpose();
  }
  if (!(var_a > 0.0) || !(var_b > 0.0)) throw DegenerateGeometry("umeyama_similarity: coincident points");
  const auto eig = linalg::jacobi_eigen<3>(scatter);
  if (eig.values[1] <= 1e-12 * eig.values[0])
    throw DegenerateGeometry("umeyama_similarity: collinear source points");

  const double s = std::sqrt(var_b / var_a);
  const Rotation r = procrustes_rotation(src, dst);
  return Similarity(s, r, cb - s * (r.matrix() * ca));
}

std::size_t ransac_required_iterations(double inlier_ratio, double confidence, std::size_t cap) {
  if (inlier_ratio >= 1.0) return 1;
  if (inlier_ratio <= 0.0) return cap;
  const double denom = std::log(1.0 - std::pow(inlier_ratio, 3));
  if (denom == 0.0) return cap;  // w^3 below double resolution
  const double n = std::ceil(std::log(1.0 - confidence) / denom);
  if (!(n < static_cast<double>(cap))) return cap;
  return std::max<std::size_t>(1, static_cast<std::size_t>(n));
}

RansacResult ransac_register(std::span<const Correspondence> corrs, const RansacConfig& cfg,
                             const InlierThreshold& c) {
  const std::size_t n = corrs.size();
  if (n < 3) throw InvalidInput("ransac_register: need at least 3 correspondences");
  if (cfg.max_iterations < 1) throw InvalidInput("ransac_register: max_iterations must be >= 1");
  if (!(cfg.confidence > 0.0 && cfg.confidence < 1.0))
    throw InvalidInput("ransac_register: confidence must be in (0, 1)");

  Rng rng(cfg.seed);
  std::size_t limit = cfg.fixed_iterations.value_or(cfg.max_iterations);
  const std::size_t max_draws = 100 * std::max(limit, std::size_t{1}) + 1000;

  std::optional<Similarity> best;
  std::size_t best_score = 0;
  std::size_t iterations = 0;
  std::size_t draws = 0;
  std::array<std::pair<Vec3, Vec3>, 3> sample;

  while (iterations < limit && draws < max_draws) {
    ++draws;
    const std::size_t i0 = rng.below(n);
    std::size_t i1 = rng.below(n - 1);
    if (i1 >= i0) ++i1;
    std::size_t i2 = rng.below(n - 2);
    const std::size_t lo = std::min(i0, i1), hi = std::max(i0, i1);
    if (i2 >= lo) ++i2;
    if (i2 >= hi) ++i2;
    sample = {std::pair{corrs[i0].a, corrs[i0].b}, std::pair{corrs[i1].a, corrs[i1].b},
              std::pair{corrs[i2].a, corrs[i2].b}};
    Similarity model;
    try {
      model = umeyama_similarity(sample);
    } catch (const DegenerateGeometry&) {
      continue;
    }
    ++iterations;
    const std::size_t score = consensus_set(corrs, model, c).size();
    if (!best || score > best_score) {
      best = model;
      best_score = score;
      if (!cfg.fixed_iterations) {
        const double w = static_cast<double>(score) / static_cast<double>(n);
        limit = ransac_required_iterations(w, cfg.confidence, cfg.max_iterations);
      }
    }
  }
  if (!best) throw DegenerateGeometry("ransac_register: no non-degenerate sample found");

  RansacResult out{*best, consensus_set(corrs, *best, c), iterations};
  if (out.inliers.size() >= 3) {
    std::vector<std::pair<Vec3, Vec3>> pairs;
    for (std::size_t k : out.inliers) pairs.emplace_back(corrs[k].a, corrs[k].b);
    try {
      const Similarity refit = umeyama_similarity(pairs);
      auto refit_inliers = consensus_set(corrs, refit, c);
      if (refit_inliers.size() >= out.inliers.size()) {
        out.transform = refit;
        out.inliers = std::move(refit_inliers);
      }
    } catch (const DegenerateGeometry&) {
    }
  }
  return out;
}

}  // namespace gmcr
