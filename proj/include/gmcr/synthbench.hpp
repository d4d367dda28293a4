#pragma once

#include "gmcr/core.hpp"
#include "gmcr/pipeline.hpp"
#include "gmcr/rng.hpp"
#include "gmcr/solvers.hpp"

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace gmcr {

enum class Shape { sphere, cube, blob_mixture, ply_file };
enum class OutlierModel { random, structured };
enum class RotationModel { full_so3, z_axis_only };

struct Interval {
  double lo;
  double hi;
};

struct SyntheticConfig {
  std::size_t n_model_points = 1500;
  Shape shape = Shape::blob_mixture;
  std::string ply_path;  // for Shape::ply_file
  double noise_half_width = 0.01;
  std::size_t n_sphere_outlier_points = 200;
  std::size_t n_correspondences = 60;
  double outlier_rate = 0.5;
  OutlierModel outlier_model = OutlierModel::random;
  std::size_t n_bases = 0;  // 0: max(1, floor(outliers / 6))
  double base_sigma = 0.1;
  bool nearest_neighbor_inliers = false;
  std::optional<double> beta;  // noise bound on generated pairs; default 2h
  Interval scale_range{1.0, 5.0};
  Interval translation_range{-1.5, 1.5};
  RotationModel rotation_model = RotationModel::full_so3;
  std::uint64_t seed = 0;

  double effective_beta() const { return beta.value_or(2.0 * noise_half_width); }
  std::size_t inlier_count() const;
  void validate() const;
};

struct ProblemInstance {
  std::vector<Vec3> source;  // model points, unit-cube scaled
  std::vector<Vec3> target;  // transformed + noise, then clutter
  std::vector<Correspondence> correspondences;
  Similarity truth;
  std::vector<bool> inlier_mask;
};

/// Haar-uniform rotation from a normalized Gaussian quaternion.
Rotation sample_uniform_rotation(Rng& rng);
/// Rotation about +z by an angle uniform in [-pi, pi).
Rotation sample_z_rotation(Rng& rng);

ProblemInstance generate_synthetic(const SyntheticConfig& cfg);

struct Metrics {
  double rot_err_rad = 0.0;
  double trans_err_m = 0.0;
  double scale_err = 0.0;
  double add_err_m = 0.0;
  bool success = false;
  double runtime_ms = 0.0;
};

Metrics evaluate(const Similarity& estimate, const ProblemInstance& instance,
                 double success_threshold_m);

struct BenchmarkSuite {
  std::vector<SyntheticConfig> configs;
  std::vector<std::string> methods{"gmcr"};  // gmcr | gmcr_band | ransac | ransac10k
  std::size_t runs_per_cell = 10;
  std::uint64_t base_seed = 0;
  GmcrConfig gmcr;
  RansacConfig ransac;
  double success_threshold_m = 0.3;
  bool record_runtime = true;  // false writes runtime_ms as 0 for byte-stable output
};

struct BenchRow {
  std::size_t config_id = 0;
  std::string method;
  std::size_t run = 0;
  std::uint64_t seed = 0;
  double outlier_rate = 0.0;
  std::size_t n_corr = 0;
  bool failed = false;
  std::string failure;
  Metrics metrics;
  double scale_density = std::numeric_limits<double>::quiet_NaN();
  double rot_density = std::numeric_limits<double>::quiet_NaN();
  double trans_density = std::numeric_limits<double>::quiet_NaN();
  bool exact_cliques = true;
  double clique_ms = std::numeric_limits<double>::quiet_NaN();
  std::size_t inliers_found = 0;
  std::size_t true_inliers_found = 0;
};

inline constexpr const char* kCsvHeader =
    "config_id,method,run,seed,outlier_rate,n_corr,rot_err_rad,trans_err_m,scale_err,add_err_m,"
    "success,runtime_ms,scale_density,rot_density,trans_density,exact_cliques";

/// Seed used for (config, run); shared by every method of the cell.
std::uint64_t cell_seed(std::uint64_t base_seed, std::size_t config_id, std::size_t run);

/// Runs every (config, method, run) cell in a fixed order. When `csv` is
/// given, writes the header, one row per cell, then median/mean/std rows
/// per (config, method) group.
std::vector<BenchRow> run_benchmark(const BenchmarkSuite& suite, std::ostream* csv = nullptr);

void write_csv(std::ostream& os, const std::vector<BenchRow>& rows, bool record_runtime);

}  // namespace gmcr
