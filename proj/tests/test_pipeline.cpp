#include "support.hpp"

#include "gmcr/invariants.hpp"
#include "gmcr/pipeline.hpp"
#include "gmcr/synthbench.hpp"

#include <doctest.h>

#include <set>

using namespace gmcr;

namespace {

SyntheticConfig noiseless(std::uint64_t seed, std::size_t n_corr = 20) {
  SyntheticConfig sc;
  sc.n_correspondences = n_corr;
  sc.outlier_rate = 0.0;
  sc.noise_half_width = 0.0;
  sc.beta = 0.02;
  sc.seed = seed;
  return sc;
}

bool subset(const std::vector<std::size_t>& small, const std::vector<std::size_t>& big) {
  return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

}  // namespace

TEST_CASE("noiseless all-inlier instances are recovered to machine precision") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto inst = generate_synthetic(noiseless(seed));
    const auto res = gmcr_register(inst.correspondences, GmcrConfig{});
    CHECK(std::abs(res.transform.s - inst.truth.s) < 1e-9);
    CHECK(geodesic_rotation_error(res.transform.r, inst.truth.r) < 1e-9);
    CHECK((res.transform.t - inst.truth.t).norm() < 1e-9);
    CHECK(res.inliers.size() == 20);
    CHECK(res.all_exact());
  }
}

TEST_CASE("70% random outliers: ADD below the success threshold") {
  int ok = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    SyntheticConfig sc;
    sc.n_correspondences = 60;
    sc.outlier_rate = 0.7;
    sc.seed = 100 + seed;
    const auto inst = generate_synthetic(sc);
    const auto res = gmcr_register(inst.correspondences, GmcrConfig{});
    ok += evaluate(res.transform, inst, 0.3).success;
  }
  CHECK(ok == 5);
}

TEST_CASE("fixed-scale mode matches estimate mode when the scale is 1") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto sc = noiseless(40 + seed, 30);
    sc.scale_range = {1.0, 1.0};
    const auto inst = generate_synthetic(sc);
    GmcrConfig fixed;
    fixed.fixed_scale = 1.0;
    const auto a = gmcr_register(inst.correspondences, GmcrConfig{});
    const auto b = gmcr_register(inst.correspondences, fixed);
    CHECK(std::abs(a.transform.s - b.transform.s) < 1e-6);
    CHECK(geodesic_rotation_error(a.transform.r, b.transform.r) < 1e-6);
    CHECK((a.transform.t - b.transform.t).norm() < 1e-6);
    CHECK(b.scale.measurements == 0);
  }
}

TEST_CASE("map_tim_clique_to_correspondences") {
  const std::vector<Tim> tims{{0, 1, Vec3(1, 0, 0), Vec3(1, 0, 0), 0.1},
                              {0, 2, Vec3(0, 1, 0), Vec3(0, 1, 0), 0.1},
                              {1, 2, Vec3(0, 0, 1), Vec3(0, 0, 1), 0.1},
                              {2, 3, Vec3(0, 0, 1), Vec3(0, 0, 1), 0.1}};
  const std::vector<std::size_t> tri{0, 1, 2};
  CHECK(map_tim_clique_to_correspondences(tri, tims, 1) == std::vector<std::size_t>{0, 1, 2});
  CHECK(map_tim_clique_to_correspondences({}, tims, 1).empty());
  const std::vector<std::size_t> with_tail{0, 1, 2, 3};
  CHECK(map_tim_clique_to_correspondences(with_tail, tims, 2) == std::vector<std::size_t>{0, 1, 2});
}

TEST_CASE("rotation-stage survivors cover the true inliers") {
  std::size_t truth = 0, kept = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    SyntheticConfig sc;
    sc.n_correspondences = 40;
    sc.outlier_rate = 0.5;
    sc.seed = 500 + seed;
    const auto inst = generate_synthetic(sc);
    const auto res = gmcr_register(inst.correspondences, GmcrConfig{});
    const std::set<std::size_t> surv(res.survivors_after_rotation.begin(), res.survivors_after_rotation.end());
    for (std::size_t k = 0; k < inst.inlier_mask.size(); ++k)
      if (inst.inlier_mask[k]) {
        ++truth;
        kept += surv.count(k);
      }
  }
  CHECK(static_cast<double>(kept) >= 0.95 * static_cast<double>(truth));
}

TEST_CASE("stage monotonicity and self-consistency of the reported inliers") {
  int consistent = 0, total = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    SyntheticConfig sc;
    sc.n_correspondences = 40;
    sc.outlier_rate = 0.1 * static_cast<double>(seed % 8);
    sc.seed = 900 + seed;
    const auto inst = generate_synthetic(sc);
    const auto res = gmcr_register(inst.correspondences, GmcrConfig{});
    CHECK(subset(res.survivors_after_rotation, res.survivors_after_consistency));
    CHECK(subset(res.inliers, res.survivors_after_rotation));
    for (std::size_t k : res.inliers) CHECK(k < inst.correspondences.size());
    const auto cs = consensus_set(inst.correspondences, res.transform, InlierThreshold(1.0));
    ++total;
    if (subset(res.inliers, cs)) {
      ++consistent;
    } else {
      MESSAGE("seed " << seed << ": reported inlier outside the final consensus set");
    }
  }
  CHECK(consistent >= 99 * total / 100);
}

TEST_CASE("rerunning on the reported inliers reproduces the transform") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    SyntheticConfig sc;
    sc.n_correspondences = 40;
    sc.outlier_rate = 0.5;
    sc.noise_half_width = 0.0;
    sc.beta = 0.02;
    sc.seed = 1300 + seed;
    const auto inst = generate_synthetic(sc);
    const auto first = gmcr_register(inst.correspondences, GmcrConfig{});
    std::vector<Correspondence> only;
    for (std::size_t k : first.inliers) only.push_back(inst.correspondences[k]);
    const auto second = gmcr_register(only, GmcrConfig{});
    CHECK(std::abs(first.transform.s - second.transform.s) < 1e-6);
    CHECK(geodesic_rotation_error(first.transform.r, second.transform.r) < 1e-6);
    CHECK((first.transform.t - second.transform.t).norm() < 1e-6);
    CHECK(second.inliers.size() == only.size());
  }
}

TEST_CASE("scale graph gets sparser with more outliers") {
  double low = 0.0, high = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    SyntheticConfig sc;
    sc.seed = 2000 + seed;
    sc.outlier_rate = 0.2;
    low += gmcr_register(generate_synthetic(sc).correspondences, GmcrConfig{}).scale.stats.density;
    sc.outlier_rate = 0.8;
    high += gmcr_register(generate_synthetic(sc).correspondences, GmcrConfig{}).scale.stats.density;
  }
  CHECK(high < low);
}

TEST_CASE("failures carry the stage name") {
  GmcrConfig cfg;
  Rng rng(1);
  const auto two = gmcr::testing::exact_correspondences(Similarity::identity(), 2, rng);
  try {
    gmcr_register(two, cfg);
    FAIL("expected a registration failure");
  } catch (const RegistrationFailure& e) {
    CHECK(e.stage() == "input");
  }

  // Three collinear points: every TIM is parallel, so rotation is undetermined.
  std::vector<Correspondence> line;
  for (int k = 0; k < 4; ++k) line.emplace_back(Vec3(k, 0, 0), Vec3(2.0 * k, 0, 0), 0.02);
  try {
    gmcr_register(line, cfg);
    FAIL("expected a registration failure");
  } catch (const RegistrationFailure& e) {
    CHECK(e.stage() == "rotation");
  }
}

TEST_CASE("graph sink sees every stage and the time budget flags exactness") {
  SyntheticConfig sc;
  sc.seed = 77;
  const auto inst = generate_synthetic(sc);
  GmcrConfig cfg;
  std::vector<std::string> stages;
  cfg.graph_sink = [&](const std::string& s, const ConsensusGraph&) { stages.push_back(s); };
  const auto res = gmcr_register(inst.correspondences, cfg);
  CHECK(stages == std::vector<std::string>{"scale", "consistency", "rotation", "translation"});
  CHECK(res.all_exact());
  CHECK(res.scale.measurements + res.dropped_short_tims == pair_count(60));
  CHECK(res.clique_ms() >= 0.0);

  GmcrConfig bad;
  bad.tim_survival_min = 0;
  CHECK_THROWS_AS(gmcr_register(inst.correspondences, bad), InvalidInput);
}

TEST_CASE("paper_band mode also registers the standard instance") {
  SyntheticConfig sc;
  sc.seed = 78;
  sc.outlier_rate = 0.6;
  const auto inst = generate_synthetic(sc);
  GmcrConfig cfg;
  cfg.rotation_mode = RotationTestMode::paper_band;
  const auto res = gmcr_register(inst.correspondences, cfg);
  CHECK(evaluate(res.transform, inst, 0.3).success);
}
