#include "gmcr/invariants.hpp"

#include "gmcr/rng.hpp"

#include <algorithm>
#include <unordered_set>

namespace gmcr {
namespace {

Tim make_tim(std::span<const Correspondence> corrs, std::size_t i, std::size_t j) {
  return {i, j, corrs[j].a - corrs[i].a, corrs[j].b - corrs[i].b, corrs[j].beta + corrs[i].beta};
}

void check_input(std::span<const Correspondence> corrs) {
  if (corrs.size() < 2) throw InvalidInput("build_tims: need at least 2 correspondences");
}

// Sorted sample of `k` distinct pair indices out of `total` (Floyd).
std::vector<std::size_t> sample_pairs(std::size_t total, std::size_t k, std::uint64_t seed) {
  Rng rng(seed);
  std::unordered_set<std::size_t> chosen;
  chosen.reserve(k * 2);
  for (std::size_t j = total - k; j < total; ++j) {
    const std::size_t t = rng.below(j + 1);
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  std::vector<std::size_t> out(chosen.begin(), chosen.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::pair<std::size_t, std::size_t> unrank_pair(std::size_t idx, std::size_t n) {
  std::size_t i = 0;
  std::size_t row = n - 1;
  while (idx >= row) {
    idx -= row;
    ++i;
    --row;
  }
  return {i, i + 1 + idx};
}

std::vector<Tim> sampled_tims(std::span<const Correspondence> corrs, const TimMode& mode) {
  const std::size_t n = corrs.size();
  std::vector<Tim> out;
  for (std::size_t idx : sample_pairs(pair_count(n), *mode.limit, mode.seed)) {
    auto [i, j] = unrank_pair(idx, n);
    out.push_back(make_tim(corrs, i, j));
  }
  return out;
}

bool needs_sampling(const TimMode& mode, std::size_t n) {
  return mode.limit && pair_count(n) > *mode.limit;
}

}  // namespace

std::vector<Tim> build_tims(std::span<const Correspondence> corrs, const TimMode& mode) {
  check_input(corrs);
  const std::size_t n = corrs.size();
  if (needs_sampling(mode, n)) return sampled_tims(corrs, mode);

  std::vector<Tim> out(pair_count(n));
  const auto rows = static_cast<std::ptrdiff_t>(n - 1);
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t r = 0; r < rows; ++r) {
    const auto i = static_cast<std::size_t>(r);
    std::size_t slot = pair_index(i, i + 1, n);
    for (std::size_t j = i + 1; j < n; ++j) out[slot++] = make_tim(corrs, i, j);
  }
  return out;
}

std::vector<Tim> build_tims_serial(std::span<const Correspondence> corrs, const TimMode& mode) {
  check_input(corrs);
  const std::size_t n = corrs.size();
  if (needs_sampling(mode, n)) return sampled_tims(corrs, mode);

  std::vector<Tim> out;
  out.reserve(pair_count(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) out.push_back(make_tim(corrs, i, j));
  return out;
}

ScaleMeasurements scale_measurements(std::span<const Tim> tims, double min_norm) {
  ScaleMeasurements out;
  out.items.reserve(tims.size());
  for (std::size_t k = 0; k < tims.size(); ++k) {
    const double na = tims[k].a_bar.norm();
    if (!(na >= min_norm) || na == 0.0) {
      ++out.dropped;
      continue;
    }
    out.items.push_back({k, tims[k].b_bar.norm() / na, tims[k].delta / na});
  }
  return out;
}

}  // namespace gmcr
