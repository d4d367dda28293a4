#include "gmcr/pipeline.hpp"

#include "gmcr/solvers.hpp"

#include <algorithm>
#include <map>
#include <optional>

namespace gmcr {
namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// Builds the graph, solves the clique and records stats; the returned
// clique is graph-local.
template <class Pred>
Clique run_stage(const std::string& stage, StageReport& report, std::size_t count, Pred&& pred,
                 const GmcrConfig& cfg) {
  const auto t0 = Clock::now();
  const ConsensusGraph g = build_graph(count, pred);
  report.graph_ms = ms_since(t0);
  if (cfg.graph_sink) cfg.graph_sink(stage, g);
  report.measurements = count;
  report.stats = graph_stats(g);
  const auto t1 = Clock::now();
  Clique clique = max_clique(g, CliqueOptions{cfg.clique_time_budget});
  report.clique_ms = ms_since(t1);
  return clique;
}

template <class IdOf>
Clique remap(const Clique& local, IdOf&& id_of) {
  Clique out{{}, local.exact};
  for (std::size_t v : local.nodes) out.nodes.push_back(id_of(v));
  std::sort(out.nodes.begin(), out.nodes.end());
  return out;
}

// Staged estimators rerun on all pairs of the final inliers. Empty when the
// scale intervals of those pairs do not intersect or the geometry is
// degenerate.
std::optional<Similarity> refit_on_inliers(std::span<const Correspondence> corrs,
                                           std::span<const std::size_t> inliers, const GmcrConfig& cfg) {
  std::vector<Correspondence> sub;
  sub.reserve(inliers.size());
  for (std::size_t k : inliers) sub.push_back(corrs[k]);
  const std::vector<Tim> tims = build_tims_serial(sub);
  try {
    double s = 0.0;
    if (cfg.fixed_scale) {
      s = *cfg.fixed_scale;
    } else {
      const auto items = scale_measurements(tims, cfg.min_tim_norm).items;
      if (items.empty()) return std::nullopt;
      std::vector<std::size_t> all(items.size());
      for (std::size_t k = 0; k < all.size(); ++k) all[k] = k;
      s = solve_scale(items, all, cfg.c);
    }
    std::vector<std::size_t> members;
    for (std::size_t k = 0; k < tims.size(); ++k)
      if (tims[k].a_bar.norm() >= cfg.min_tim_norm && tims[k].a_bar.norm() > 0.0) members.push_back(k);
    const Rotation r = solve_rotation_arun(tims, members, s);
    const auto tm = translation_measurements(sub, s, r);
    std::vector<std::size_t> every(tm.size());
    for (std::size_t k = 0; k < every.size(); ++k) every[k] = k;
    return Similarity(s, r, solve_translation(tm, every));
  } catch (const InconsistentClique&) {
    return std::nullopt;
  } catch (const DegenerateGeometry&) {
    return std::nullopt;
  }
}

}  // namespace

void GmcrConfig::validate() const {
  if (!(beta_default > 0.0)) throw InvalidInput("beta_default must be > 0");
  if (tim_survival_min < 1) throw InvalidInput("tim_survival_min must be >= 1");
  if (fixed_scale && !(*fixed_scale > 0.0)) throw InvalidInput("fixed scale must be > 0");
  if (!(min_tim_norm >= 0.0)) throw InvalidInput("min_tim_norm must be >= 0");
}

std::vector<std::size_t> map_tim_clique_to_correspondences(std::span<const std::size_t> clique_tims,
                                                           std::span<const Tim> tims,
                                                           std::size_t min_count) {
  std::map<std::size_t, std::size_t> hits;
  for (std::size_t k : clique_tims) {
    ++hits[tims[k].i];
    ++hits[tims[k].j];
  }
  std::vector<std::size_t> out;
  for (const auto& [idx, n] : hits)
    if (n >= min_count) out.push_back(idx);
  return out;
}

RegistrationResult gmcr_register(std::span<const Correspondence> corrs, const GmcrConfig& cfg) {
  cfg.validate();
  const auto t_start = Clock::now();
  if (corrs.size() < 3)
    throw RegistrationFailure("input", "insufficient input: need at least 3 correspondences");

  RegistrationResult res;
  const std::vector<Tim> tims = build_tims(corrs, cfg.tim_mode);
  const InlierThreshold& c = cfg.c;

  // Scale.
  double s_hat = 0.0;
  if (cfg.fixed_scale) {
    s_hat = *cfg.fixed_scale;
  } else {
    const auto t0 = Clock::now();
    const ScaleMeasurements sm = scale_measurements(tims, cfg.min_tim_norm);
    res.dropped_short_tims = sm.dropped;
    if (sm.items.empty()) throw RegistrationFailure("scale", "no usable scale measurements");
    const auto& items = sm.items;
    const Clique local = run_stage(
        "scale", res.scale, items.size(),
        [&](std::size_t i, std::size_t j) { return scale_consensus(items[i], items[j], c); }, cfg);
    if (local.nodes.empty()) throw RegistrationFailure("scale", "empty clique");
    try {
      s_hat = solve_scale(items, local.nodes, c);
    } catch (const InconsistentClique& e) {
      throw RegistrationFailure("scale", e.what());
    }
    res.scale.clique = remap(local, [&](std::size_t v) { return items[v].tim_index; });
    res.scale.total_ms = ms_since(t0);
  }

  // Correspondence pruning at the scale estimate.
  {
    const auto t0 = Clock::now();
    const ConsensusGraph g = consistency_graph(corrs, s_hat, c);
    res.consistency.graph_ms = ms_since(t0);
    if (cfg.graph_sink) cfg.graph_sink("consistency", g);
    res.consistency.measurements = g.size();
    res.consistency.stats = graph_stats(g);
    const auto t1 = Clock::now();
    res.consistency.clique = max_clique(g, CliqueOptions{cfg.clique_time_budget});
    res.consistency.clique_ms = ms_since(t1);
    res.consistency.total_ms = ms_since(t0);
    res.survivors_after_consistency = res.consistency.clique.nodes;
    if (res.survivors_after_consistency.size() < 3)
      throw RegistrationFailure("consistency", "fewer than 3 surviving correspondences");
  }

  // Rotation over TIMs whose endpoints both survived.
  Rotation r_hat;
  {
    const auto t0 = Clock::now();
    std::vector<char> alive(corrs.size(), 0);
    for (std::size_t i : res.survivors_after_consistency) alive[i] = 1;
    std::vector<RotMeasurement> rm;
    for (std::size_t k = 0; k < tims.size(); ++k) {
      const Tim& tim = tims[k];
      if (!alive[tim.i] || !alive[tim.j]) continue;
      const double na = tim.a_bar.norm();
      const double nb = tim.b_bar.norm();
      if (!(na >= cfg.min_tim_norm) || !(nb >= cfg.min_tim_norm) || na == 0.0 || nb == 0.0) {
        ++res.dropped_short_tims;
        continue;
      }
      if (auto m = make_rot_measurement(tim, k, s_hat, c)) {
        rm.push_back(*m);
      } else {
        ++res.infeasible_tims;
      }
    }
    if (rm.empty()) throw RegistrationFailure("rotation", "no feasible rotation measurements");
    const auto mode = cfg.rotation_mode;
    const Clique local = run_stage(
        "rotation", res.rotation, rm.size(),
        [&](std::size_t i, std::size_t j) { return rotation_consensus(rm[i], rm[j], mode); }, cfg);
    if (local.nodes.empty()) throw RegistrationFailure("rotation", "empty clique");
    res.rotation.clique = remap(local, [&](std::size_t v) { return rm[v].tim_index; });
    try {
      r_hat = solve_rotation_arun(tims, res.rotation.clique.nodes, s_hat);
    } catch (const DegenerateGeometry& e) {
      throw RegistrationFailure("rotation", e.what());
    }
    res.survivors_after_rotation =
        map_tim_clique_to_correspondences(res.rotation.clique.nodes, tims, cfg.tim_survival_min);
    res.rotation.total_ms = ms_since(t0);
    if (res.survivors_after_rotation.size() < 3)
      throw RegistrationFailure("rotation", "fewer than 3 surviving correspondences");
  }

  // Translation.
  {
    const auto t0 = Clock::now();
    const auto tm = translation_measurements(corrs, res.survivors_after_rotation, s_hat, r_hat);
    const Clique local = run_stage(
        "translation", res.translation, tm.size(),
        [&](std::size_t i, std::size_t j) { return translation_consensus(tm[i], tm[j], c); }, cfg);
    if (local.nodes.size() < 3)
      throw RegistrationFailure("translation", "fewer than 3 consistent correspondences");
    const Vec3 t_hat = solve_translation(tm, local.nodes);
    res.translation.clique = remap(local, [&](std::size_t v) { return tm[v].corr_index; });
    res.inliers = res.translation.clique.nodes;
    res.transform = Similarity(s_hat, r_hat, t_hat);
    res.translation.total_ms = ms_since(t0);
  }

  if (cfg.refit_final) {
    if (auto refit = refit_on_inliers(corrs, res.inliers, cfg)) {
      res.transform = *refit;
      res.refit = true;
    }
  }

  res.total_ms = ms_since(t_start);
  return res;
}

}  // namespace gmcr
