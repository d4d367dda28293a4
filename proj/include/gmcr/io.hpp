#pragma once

#include "gmcr/core.hpp"
#include "gmcr/pipeline.hpp"
#include "gmcr/solvers.hpp"
#include "gmcr/synthbench.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gmcr::io {

/// Malformed config, correspondence or suite file.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CorrespondenceFile {
  std::vector<Correspondence> correspondences;
  std::optional<Similarity> truth;  // optional {"truth": {...}} record
};

/// Line-delimited records {"a":[x,y,z],"b":[x,y,z],"beta":r}, or a single
/// document {"correspondences":[...], "truth":{...}} / a bare array.
/// Records without beta take `default_beta`.
CorrespondenceFile read_correspondences(std::istream& in, double default_beta);
CorrespondenceFile read_correspondences(const std::filesystem::path& path, double default_beta);

void write_correspondences(std::ostream& out, const std::vector<Correspondence>& corrs,
                           const std::optional<Similarity>& truth = std::nullopt);

nlohmann::json similarity_to_json(const Similarity& t);
Similarity similarity_from_json(const nlohmann::json& j);

struct RunConfig {
  GmcrConfig gmcr;
  RansacConfig ransac;
  SyntheticConfig synthetic;
};

/// Sections "gmcr", "ransac", "synthetic"; unknown keys are rejected and
/// absent keys keep their defaults.
RunConfig parse_run_config(const nlohmann::json& j);
RunConfig read_run_config(const std::filesystem::path& path);

void apply_gmcr(const nlohmann::json& j, GmcrConfig& cfg);
void apply_ransac(const nlohmann::json& j, RansacConfig& cfg);
void apply_synthetic(const nlohmann::json& j, SyntheticConfig& cfg);

/// Suite file: base "synthetic" section, optional "cells" (list of
/// overrides) and "sweep" (key -> list, cartesian product), plus
/// "methods", "runs", "base_seed", "success_threshold_m", "gmcr", "ransac".
BenchmarkSuite parse_suite(const nlohmann::json& j);
BenchmarkSuite read_suite(const std::filesystem::path& path);

nlohmann::json read_json_file(const std::filesystem::path& path);

nlohmann::json stage_to_json(const StageReport& stage, bool timings);
nlohmann::json gmcr_result_to_json(const RegistrationResult& res, bool timings);
nlohmann::json ransac_result_to_json(const RansacResult& res);

}  // namespace gmcr::io
