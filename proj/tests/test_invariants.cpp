#include "support.hpp"

#include "gmcr/invariants.hpp"

#include <doctest.h>

#include <omp.h>

#include <set>

using namespace gmcr;
using gmcr::testing::exact_correspondences;
using gmcr::testing::random_similarity;

namespace {

std::vector<Correspondence> noisy_inliers(const Similarity& t, std::size_t n, double beta, Rng& rng) {
  std::vector<Correspondence> out;
  for (std::size_t k = 0; k < n; ++k) {
    const Vec3 a(rng.uniform(), rng.uniform(), rng.uniform());
    // Offset strictly inside the ball of radius beta.
    const Vec3 e = gmcr::testing::random_unit(rng) * beta * rng.uniform();
    out.emplace_back(a, apply(t, a) + e, beta);
  }
  return out;
}

}  // namespace

TEST_CASE("pair indexing") {
  CHECK(pair_count(0) == 0);
  CHECK(pair_count(1) == 0);
  CHECK(pair_count(40) == 780);
  std::size_t k = 0;
  for (std::size_t i = 0; i < 9; ++i)
    for (std::size_t j = i + 1; j < 9; ++j) CHECK(pair_index(i, j, 9) == k++);
}

TEST_CASE("build_tims: three correspondences") {
  Rng rng(1);
  const auto corrs = exact_correspondences(Similarity::identity(), 3, rng);
  const auto tims = build_tims(corrs);
  REQUIRE(tims.size() == 3);
  CHECK(tims[0].i == 0);
  CHECK(tims[0].j == 1);
  CHECK(tims[1].i == 0);
  CHECK(tims[1].j == 2);
  CHECK(tims[2].i == 1);
  CHECK(tims[2].j == 2);
  for (const auto& t : tims) {
    CHECK(t.a_bar == corrs[t.j].a - corrs[t.i].a);
    CHECK(t.b_bar == corrs[t.j].b - corrs[t.i].b);
    CHECK(t.delta == corrs[t.i].beta + corrs[t.j].beta);
  }
}

TEST_CASE("build_tims: counts, errors and serial agreement") {
  Rng rng(2);
  const auto corrs = exact_correspondences(random_similarity(rng), 40, rng);
  CHECK(build_tims(corrs).size() == 780);
  CHECK_THROWS_AS(build_tims(std::span<const Correspondence>(corrs.data(), 1)), InvalidInput);
  CHECK_THROWS_AS(build_tims_serial(std::span<const Correspondence>(corrs.data(), 1)), InvalidInput);

  const int saved = omp_get_max_threads();
  for (int threads : {1, 2, 4}) {
    omp_set_num_threads(threads);
    const auto par = build_tims(corrs);
    const auto ser = build_tims_serial(corrs);
    REQUIRE(par.size() == ser.size());
    for (std::size_t k = 0; k < par.size(); ++k) {
      CHECK(par[k].i == ser[k].i);
      CHECK(par[k].j == ser[k].j);
      CHECK(par[k].a_bar == ser[k].a_bar);
      CHECK(par[k].b_bar == ser[k].b_bar);
      CHECK(par[k].delta == ser[k].delta);
    }
  }
  omp_set_num_threads(saved);
}

TEST_CASE("build_tims: complete_limit subsampling") {
  Rng rng(3);
  const auto corrs = exact_correspondences(Similarity::identity(), 50, rng);
  const auto all = build_tims(corrs, TimMode::complete_limit(5000, 9));
  CHECK(all.size() == pair_count(50));

  const auto sub = build_tims(corrs, TimMode::complete_limit(300, 9));
  REQUIRE(sub.size() == 300);
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (const auto& t : sub) {
    CHECK(t.i < t.j);
    CHECK(t.j < 50);
    seen.insert({t.i, t.j});
  }
  CHECK(seen.size() == 300);
  const auto again = build_tims_serial(corrs, TimMode::complete_limit(300, 9));
  REQUIRE(again.size() == sub.size());
  for (std::size_t k = 0; k < sub.size(); ++k) CHECK(again[k].i == sub[k].i);
  for (std::size_t k = 0; k < sub.size(); ++k) CHECK(again[k].j == sub[k].j);
}

TEST_CASE("noiseless TIMs satisfy the model and give the true scale") {
  Rng rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const Similarity t(3.0, gmcr::testing::eigen_random_rotation(rng), rng.normal_vec3());
    const auto corrs = exact_correspondences(t, 25, rng);
    const auto tims = build_tims(corrs);
    for (const auto& k : tims) CHECK((k.b_bar - t.s * (t.r * k.a_bar)).norm() < 1e-12);
    const auto sm = scale_measurements(tims);
    CHECK(sm.dropped == 0);
    for (const auto& m : sm.items) CHECK(std::abs(m.s - 3.0) < 1e-12);
  }
}

TEST_CASE("scale_measurements: unit arithmetic and dropping") {
  std::vector<Tim> tims{{0, 1, Vec3(1, 0, 0), Vec3(0, 2, 0), 0.04},
                        {0, 2, Vec3(1e-9, 0, 0), Vec3(0, 1, 0), 0.04},
                        {1, 2, Vec3::Zero(), Vec3(0, 1, 0), 0.04}};
  const auto sm = scale_measurements(tims);
  REQUIRE(sm.items.size() == 1);
  CHECK(sm.dropped == 2);
  CHECK(sm.items[0].tim_index == 0);
  CHECK(sm.items[0].s == 2.0);
  CHECK(sm.items[0].alpha == 0.04);

  const auto keep = scale_measurements(tims, 0.0);
  CHECK(keep.items.size() == 2);  // the zero-length TIM is always dropped
  CHECK(keep.dropped == 1);
}

TEST_CASE("noise-bound soundness of TIMs and scale measurements") {
  Rng rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const Similarity t = random_similarity(rng);
    const double beta = rng.uniform(0.005, 0.05);
    const auto corrs = noisy_inliers(t, 30, beta, rng);
    const auto tims = build_tims(corrs);
    for (const auto& k : tims) CHECK((k.b_bar - t.s * (t.r * k.a_bar)).norm() <= k.delta);
    for (const auto& m : scale_measurements(tims).items) CHECK(std::abs(m.s - t.s) <= m.alpha);
  }
}
