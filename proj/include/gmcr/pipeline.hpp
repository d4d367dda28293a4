#pragma once

#include "gmcr/consensus.hpp"
#include "gmcr/core.hpp"
#include "gmcr/graph.hpp"
#include "gmcr/invariants.hpp"

#include <chrono>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gmcr {

struct GmcrConfig {
  InlierThreshold c{1.0};
  double beta_default = 0.02;        // used by loaders when a record has no beta
  std::optional<double> fixed_scale;  // empty: estimate scale
  RotationTestMode rotation_mode = RotationTestMode::tight;
  TimMode tim_mode;
  double min_tim_norm = kDefaultMinTimNorm;
  std::size_t tim_survival_min = 1;
  std::optional<std::chrono::milliseconds> clique_time_budget;
  /// Re-estimate s, R and t from every TIM among the final inliers once the
  /// translation clique is known, so the output depends on the inlier set
  /// alone. Falls back to the staged estimate when those scale intervals
  /// share no point.
  bool refit_final = true;
  /// Called with each stage graph ("scale", "consistency", "rotation",
  /// "translation") right after construction; for debugging dumps.
  std::function<void(const std::string& stage, const ConsensusGraph&)> graph_sink;

  void validate() const;
};

struct StageReport {
  std::size_t measurements = 0;  // graph nodes
  Clique clique;                 // measurement ids (TIM or correspondence indices)
  GraphStats stats;
  double graph_ms = 0.0;
  double clique_ms = 0.0;
  double total_ms = 0.0;
};

struct RegistrationResult {
  Similarity transform;
  std::vector<std::size_t> inliers;  // correspondence indices, ascending

  StageReport scale;        // empty when the scale is fixed
  StageReport consistency;  // correspondence-level pruning at the scale estimate
  StageReport rotation;
  StageReport translation;

  std::size_t dropped_short_tims = 0;
  std::size_t infeasible_tims = 0;
  bool refit = false;  // transform came from the final-inlier refit
  std::vector<std::size_t> survivors_after_consistency;
  std::vector<std::size_t> survivors_after_rotation;
  double total_ms = 0.0;

  bool all_exact() const {
    return scale.clique.exact && consistency.clique.exact && rotation.clique.exact &&
           translation.clique.exact;
  }
  double clique_ms() const {
    return scale.clique_ms + consistency.clique_ms + rotation.clique_ms + translation.clique_ms;
  }
};

/// Carries the name of the stage that could not proceed.
class RegistrationFailure : public std::runtime_error {
 public:
  RegistrationFailure(std::string stage, const std::string& what)
      : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

RegistrationResult gmcr_register(std::span<const Correspondence> corrs, const GmcrConfig& cfg);

/// Correspondences appearing in at least `min_count` of the clique's TIMs.
std::vector<std::size_t> map_tim_clique_to_correspondences(std::span<const std::size_t> clique_tims,
                                                           std::span<const Tim> tims,
                                                           std::size_t min_count);

}  // namespace gmcr
