#include "gmcr/synthbench.hpp"

#include "gmcr/ply.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

namespace gmcr {
namespace {

constexpr double kPi = std::numbers::pi;

Vec3 unit_vector(Rng& rng) {
  Vec3 v;
  do {
    v = rng.normal_vec3();
  } while (v.squaredNorm() < 1e-24);
  return v.normalized();
}

std::vector<Vec3> sample_cube_surface(Rng& rng, std::size_t n) {
  std::vector<Vec3> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto face = rng.below(6);
    Vec3 p(rng.uniform(), rng.uniform(), rng.uniform());
    p[static_cast<int>(face / 2)] = static_cast<double>(face % 2);
    out.push_back(p);
  }
  return out;
}

std::vector<Vec3> sample_blobs(Rng& rng, std::size_t n) {
  constexpr std::size_t kBlobs = 6;
  std::vector<Vec3> centers;
  std::vector<double> sigmas;
  for (std::size_t b = 0; b < kBlobs; ++b) {
    centers.emplace_back(rng.uniform(), rng.uniform(), rng.uniform());
    sigmas.push_back(rng.uniform(0.05, 0.15));
  }
  std::vector<Vec3> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto b = rng.below(kBlobs);
    out.push_back(centers[b] + sigmas[b] * rng.normal_vec3());
  }
  return out;
}

std::vector<Vec3> load_model(const SyntheticConfig& cfg, Rng& rng) {
  const std::size_t n = cfg.n_model_points;
  switch (cfg.shape) {
    case Shape::sphere: {
      std::vector<Vec3> out;
      for (std::size_t k = 0; k < n; ++k) out.push_back(0.5 * unit_vector(rng));
      return out;
    }
    case Shape::cube:
      return sample_cube_surface(rng, n);
    case Shape::blob_mixture:
      return sample_blobs(rng, n);
    case Shape::ply_file: {
      std::vector<Vec3> all = parse_ply(std::filesystem::path(cfg.ply_path));
      if (all.size() < n) {
        if (all.size() < cfg.n_correspondences)
          throw InvalidInput("synthetic: PLY has fewer points than correspondences");
        return all;
      }
      // partial Fisher-Yates for a uniform subset
      for (std::size_t k = 0; k < n; ++k) std::swap(all[k], all[k + rng.below(all.size() - k)]);
      all.resize(n);
      return all;
    }
  }
  throw InvalidInput("synthetic: unknown shape");
}

// Centre on the bounding box and scale the largest extent to 1.
void rescale_unit_cube(std::vector<Vec3>& pts) {
  Vec3 lo = pts.front(), hi = pts.front();
  for (const auto& p : pts) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double extent = (hi - lo).maxCoeff();
  if (!(extent > 0.0)) throw DegenerateGeometry("synthetic: model has zero extent");
  const Vec3 centre = 0.5 * (lo + hi);
  for (auto& p : pts) p = (p - centre) / extent;
}

std::vector<std::size_t> distinct(Rng& rng, std::size_t n, std::size_t k) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (std::size_t i = 0; i < k; ++i) std::swap(idx[i], idx[i + rng.below(n - i)]);
  idx.resize(k);
  return idx;
}

std::size_t nearest_other(const std::vector<Vec3>& pts, std::size_t self) {
  std::size_t best = self;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < pts.size(); ++k) {
    if (k == self) continue;
    const double d = (pts[k] - pts[self]).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  return best;
}

}  // namespace

std::size_t SyntheticConfig::inlier_count() const {
  const double x = (1.0 - outlier_rate) * static_cast<double>(n_correspondences);
  return static_cast<std::size_t>(std::ceil(x - 1e-9));
}

void SyntheticConfig::validate() const {
  if (n_model_points < 3) throw InvalidInput("synthetic: n_model_points must be >= 3");
  if (n_correspondences < 3) throw InvalidInput("synthetic: n_correspondences must be >= 3");
  if (!(outlier_rate >= 0.0 && outlier_rate < 1.0))
    throw InvalidInput("synthetic: outlier_rate must be in [0, 1)");
  if (!(noise_half_width >= 0.0)) throw InvalidInput("synthetic: noise_half_width must be >= 0");
  if (!(effective_beta() > 0.0)) throw InvalidInput("synthetic: beta must be > 0");
  if (!(scale_range.lo > 0.0 && scale_range.lo <= scale_range.hi))
    throw InvalidInput("synthetic: scale_range must be a nonempty positive interval");
  if (!(translation_range.lo <= translation_range.hi))
    throw InvalidInput("synthetic: translation_range must be nonempty");
  if (!(base_sigma >= 0.0)) throw InvalidInput("synthetic: base_sigma must be >= 0");
  if (shape != Shape::ply_file && inlier_count() > n_model_points)
    throw InvalidInput("synthetic: more inliers than model points");
  if (shape == Shape::ply_file && ply_path.empty()) throw InvalidInput("synthetic: ply_path missing");
}

Rotation sample_uniform_rotation(Rng& rng) {
  Eigen::Vector4d q;
  do {
    q = {rng.normal(), rng.normal(), rng.normal(), rng.normal()};
  } while (q.squaredNorm() < 1e-24);
  return Rotation::from_quaternion(q[0], q[1], q[2], q[3]);
}

Rotation sample_z_rotation(Rng& rng) {
  const double th = rng.uniform(-kPi, kPi);
  Mat3 m;
  m << std::cos(th), -std::sin(th), 0, std::sin(th), std::cos(th), 0, 0, 0, 1;
  return Rotation(m);
}

ProblemInstance generate_synthetic(const SyntheticConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  ProblemInstance inst;

  inst.source = load_model(cfg, rng);
  rescale_unit_cube(inst.source);
  const std::size_t n_model = inst.source.size();
  const std::size_t n_inl = cfg.inlier_count();
  if (n_inl > n_model) throw InvalidInput("synthetic: more inliers than model points");
  const std::size_t n_out = cfg.n_correspondences - n_inl;

  const double s = rng.uniform(cfg.scale_range.lo, cfg.scale_range.hi);
  const Rotation r = cfg.rotation_model == RotationModel::full_so3 ? sample_uniform_rotation(rng)
                                                                   : sample_z_rotation(rng);
  const Vec3 t(rng.uniform(cfg.translation_range.lo, cfg.translation_range.hi),
               rng.uniform(cfg.translation_range.lo, cfg.translation_range.hi),
               rng.uniform(cfg.translation_range.lo, cfg.translation_range.hi));
  inst.truth = Similarity(s, r, t);

  const double h = cfg.noise_half_width;
  inst.target.reserve(n_model + cfg.n_sphere_outlier_points);
  for (const auto& p : inst.source) {
    const Vec3 noise(rng.uniform(-h, h), rng.uniform(-h, h), rng.uniform(-h, h));
    inst.target.push_back(apply(inst.truth, p) + noise);
  }
  Vec3 centroid = Vec3::Zero();
  for (const auto& p : inst.target) centroid += p;
  centroid /= static_cast<double>(n_model);
  double radius = 0.0;
  for (const auto& p : inst.target) radius = std::max(radius, (p - centroid).norm());
  radius *= 1.5;
  for (std::size_t k = 0; k < cfg.n_sphere_outlier_points; ++k)
    inst.target.push_back(centroid + radius * unit_vector(rng));

  const double beta = cfg.effective_beta();
  std::vector<Correspondence> corrs;
  std::vector<bool> mask;
  corrs.reserve(cfg.n_correspondences);

  for (std::size_t i : distinct(rng, n_model, n_inl)) {
    const std::size_t j = cfg.nearest_neighbor_inliers ? nearest_other(inst.target, i) : i;
    corrs.emplace_back(inst.source[i], inst.target[j], beta);
    mask.push_back(true);
    if (!cfg.nearest_neighbor_inliers &&
        (corrs.back().b - apply(inst.truth, corrs.back().a)).norm() > std::sqrt(3.0) * h + 1e-9)
      throw std::logic_error("synthetic: inlier exceeds its noise bound");
  }

  if (cfg.outlier_model == OutlierModel::random) {
    const double margin = 5.0 * beta;
    for (std::size_t k = 0; k < n_out; ++k) {
      bool placed = false;
      for (int attempt = 0; attempt < 1000 && !placed; ++attempt) {
        const Vec3& a = inst.source[rng.below(n_model)];
        const Vec3& b = inst.target[rng.below(inst.target.size())];
        if ((b - apply(inst.truth, a)).norm() < margin) continue;
        corrs.emplace_back(a, b, beta);
        mask.push_back(false);
        placed = true;
      }
      if (!placed) throw InvalidInput("synthetic: cannot place an outlier clear of the model");
    }
  } else {
    const std::size_t n_bases = cfg.n_bases > 0 ? cfg.n_bases : std::max<std::size_t>(1, n_out / 6);
    std::vector<std::pair<Vec3, Vec3>> bases;
    for (std::size_t k = 0; k < n_bases; ++k)
      bases.emplace_back(inst.source[rng.below(n_model)], inst.target[rng.below(inst.target.size())]);
    for (std::size_t k = 0; k < n_out; ++k) {
      const auto& [ba, bb] = bases[k % n_bases];
      const Vec3 a = ba + cfg.base_sigma * rng.normal_vec3();
      const Vec3 b = bb + cfg.base_sigma * rng.normal_vec3();
      corrs.emplace_back(a, b, beta);
      mask.push_back(false);
    }
  }

  // shuffle pairs and labels together
  std::vector<std::size_t> perm(corrs.size());
  for (std::size_t k = 0; k < perm.size(); ++k) perm[k] = k;
  for (std::size_t k = perm.size(); k > 1; --k) std::swap(perm[k - 1], perm[rng.below(k)]);
  for (std::size_t k : perm) {
    inst.correspondences.push_back(corrs[k]);
    inst.inlier_mask.push_back(mask[k]);
  }
  return inst;
}

Metrics evaluate(const Similarity& estimate, const ProblemInstance& instance,
                 double success_threshold_m) {
  Metrics m;
  m.rot_err_rad = geodesic_rotation_error(estimate.r, instance.truth.r);
  m.trans_err_m = (instance.truth.t - estimate.t).norm();
  m.scale_err = std::abs(instance.truth.s - estimate.s);
  m.add_err_m = add_error(estimate, instance.truth, instance.source);
  m.success = m.add_err_m < success_threshold_m;
  return m;
}

std::uint64_t cell_seed(std::uint64_t base_seed, std::size_t config_id, std::size_t run) {
  return mix_seed(mix_seed(base_seed, config_id), run);
}

namespace {

BenchRow run_cell(const BenchmarkSuite& suite, const ProblemInstance& inst, const std::string& method,
                  std::size_t method_idx, std::uint64_t seed) {
  using Clock = std::chrono::steady_clock;
  BenchRow row;
  row.method = method;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const auto t0 = Clock::now();
  try {
    Similarity estimate;
    std::vector<std::size_t> inliers;
    if (method == "gmcr" || method == "gmcr_band") {
      GmcrConfig cfg = suite.gmcr;
      if (method == "gmcr_band") cfg.rotation_mode = RotationTestMode::paper_band;
      const auto res = gmcr_register(inst.correspondences, cfg);
      estimate = res.transform;
      inliers = res.inliers;
      row.scale_density = res.scale.measurements ? res.scale.stats.density : nan;
      row.rot_density = res.rotation.stats.density;
      row.trans_density = res.translation.stats.density;
      row.exact_cliques = res.all_exact();
      row.clique_ms = res.clique_ms();
    } else if (method == "ransac" || method == "ransac10k") {
      RansacConfig cfg = suite.ransac;
      cfg.seed = mix_seed(seed, method_idx + 1);
      if (method == "ransac10k") cfg.fixed_iterations = 10000;
      const auto res = ransac_register(inst.correspondences, cfg, suite.gmcr.c);
      estimate = res.transform;
      inliers = res.inliers;
    } else {
      throw InvalidInput("unknown method: " + method);
    }
    const double runtime = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    row.metrics = evaluate(estimate, inst, suite.success_threshold_m);
    row.metrics.runtime_ms = runtime;
    row.inliers_found = inliers.size();
    for (std::size_t k : inliers) row.true_inliers_found += inst.inlier_mask[k] ? 1 : 0;
  } catch (const InvalidInput&) {
    throw;
  } catch (const std::exception& e) {
    row.failed = true;
    row.failure = e.what();
    row.metrics = {nan, nan, nan, nan, false,
                   std::chrono::duration<double, std::milli>(Clock::now() - t0).count()};
  }
  return row;
}

}  // namespace

std::vector<BenchRow> run_benchmark(const BenchmarkSuite& suite, std::ostream* csv) {
  if (suite.configs.empty()) throw InvalidInput("benchmark: empty suite");
  if (suite.methods.empty()) throw InvalidInput("benchmark: no methods");
  std::vector<BenchRow> rows;
  for (std::size_t ci = 0; ci < suite.configs.size(); ++ci) {
    for (std::size_t run = 0; run < suite.runs_per_cell; ++run) {
      SyntheticConfig cfg = suite.configs[ci];
      cfg.seed = cell_seed(suite.base_seed, ci, run);
      const ProblemInstance inst = generate_synthetic(cfg);
      for (std::size_t mi = 0; mi < suite.methods.size(); ++mi) {
        BenchRow row = run_cell(suite, inst, suite.methods[mi], mi, cfg.seed);
        row.config_id = ci;
        row.run = run;
        row.seed = cfg.seed;
        row.outlier_rate = cfg.outlier_rate;
        row.n_corr = cfg.n_correspondences;
        rows.push_back(std::move(row));
      }
    }
  }
  // group rows by (config, method, run) for output
  std::stable_sort(rows.begin(), rows.end(), [&](const BenchRow& x, const BenchRow& y) {
    if (x.config_id != y.config_id) return x.config_id < y.config_id;
    const auto mx = std::find(suite.methods.begin(), suite.methods.end(), x.method);
    const auto my = std::find(suite.methods.begin(), suite.methods.end(), y.method);
    if (mx != my) return mx < my;
    return x.run < y.run;
  });
  if (csv) write_csv(*csv, rows, suite.record_runtime);
  return rows;
}

namespace {

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

double median(std::vector<double> v) {
  std::erase_if(v, [](double x) { return std::isnan(x); });
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

double mean(std::vector<double> v) {
  std::erase_if(v, [](double x) { return std::isnan(x); });
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double stddev(std::vector<double> v) {
  std::erase_if(v, [](double x) { return std::isnan(x); });
  if (v.size() < 2) return v.empty() ? std::numeric_limits<double>::quiet_NaN() : 0.0;
  const double mu = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - mu) * (x - mu);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace

void write_csv(std::ostream& os, const std::vector<BenchRow>& rows, bool record_runtime) {
  os << kCsvHeader << '\n';
  auto runtime = [&](double v) { return record_runtime ? fmt(v) : std::string("0"); };
  for (const auto& r : rows) {
    os << r.config_id << ',' << r.method << ',' << r.run << ',' << r.seed << ',' << fmt(r.outlier_rate)
       << ',' << r.n_corr << ',' << fmt(r.metrics.rot_err_rad) << ',' << fmt(r.metrics.trans_err_m)
       << ',' << fmt(r.metrics.scale_err) << ',' << fmt(r.metrics.add_err_m) << ','
       << (r.metrics.success ? 1 : 0) << ',' << runtime(r.metrics.runtime_ms) << ','
       << fmt(r.scale_density) << ',' << fmt(r.rot_density) << ',' << fmt(r.trans_density) << ','
       << (r.exact_cliques ? 1 : 0) << '\n';
  }

  // aggregates per (config, method) in first-appearance order
  std::vector<std::pair<std::size_t, std::string>> groups;
  for (const auto& r : rows) {
    const std::pair key{r.config_id, r.method};
    if (std::find(groups.begin(), groups.end(), key) == groups.end()) groups.push_back(key);
  }
  for (const auto& [cid, method] : groups) {
    std::vector<const BenchRow*> g;
    for (const auto& r : rows)
      if (r.config_id == cid && r.method == method) g.push_back(&r);
    auto col = [&](auto get) {
      std::vector<double> v;
      for (const auto* r : g) v.push_back(get(*r));
      return v;
    };
    const auto rot = col([](const BenchRow& r) { return r.metrics.rot_err_rad; });
    const auto trans = col([](const BenchRow& r) { return r.metrics.trans_err_m; });
    const auto scale = col([](const BenchRow& r) { return r.metrics.scale_err; });
    const auto add = col([](const BenchRow& r) { return r.metrics.add_err_m; });
    const auto succ = col([](const BenchRow& r) { return r.metrics.success ? 1.0 : 0.0; });
    const auto rt = col([](const BenchRow& r) { return r.metrics.runtime_ms; });
    const auto sd = col([](const BenchRow& r) { return r.scale_density; });
    const auto rd = col([](const BenchRow& r) { return r.rot_density; });
    const auto td = col([](const BenchRow& r) { return r.trans_density; });
    const auto ex = col([](const BenchRow& r) { return r.exact_cliques ? 1.0 : 0.0; });
    const BenchRow& first = *g.front();
    auto emit = [&](const char* label, double (*agg)(std::vector<double>)) {
      os << cid << ',' << method << ',' << label << ",," << fmt(first.outlier_rate) << ','
         << first.n_corr << ',' << fmt(agg(rot)) << ',' << fmt(agg(trans)) << ',' << fmt(agg(scale))
         << ',' << fmt(agg(add)) << ',' << fmt(agg(succ)) << ',' << runtime(agg(rt)) << ','
         << fmt(agg(sd)) << ',' << fmt(agg(rd)) << ',' << fmt(agg(td)) << ',' << fmt(agg(ex)) << '\n';
    };
    emit("median", median);
    emit("mean", mean);
    emit("std", stddev);
  }
}

}  // namespace gmcr
