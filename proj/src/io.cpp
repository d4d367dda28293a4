#include "gmcr/io.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace gmcr::io {

using nlohmann::json;

namespace {

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw FormatError(where + ": expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : j.items())
    if (!ok.count(key)) throw FormatError(where + ": unknown key '" + key + "'");
}

Vec3 vec3_from(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) throw FormatError(where + ": expected [x, y, z]");
  Vec3 v;
  for (int k = 0; k < 3; ++k) {
    if (!j[k].is_number()) throw FormatError(where + ": coordinate is not a number");
    v[k] = j[k].get<double>();
  }
  if (!v.allFinite()) throw FormatError(where + ": coordinate is not finite");
  return v;
}

json vec3_to(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

double number(const json& j, const std::string& where) {
  if (!j.is_number()) throw FormatError(where + ": expected a number");
  return j.get<double>();
}

std::size_t count(const json& j, const std::string& where) {
  if (!j.is_number_integer() || j.get<long long>() < 0)
    throw FormatError(where + ": expected a non-negative integer");
  return j.get<std::size_t>();
}

bool boolean(const json& j, const std::string& where) {
  if (!j.is_boolean()) throw FormatError(where + ": expected true/false");
  return j.get<bool>();
}

std::string text(const json& j, const std::string& where) {
  if (!j.is_string()) throw FormatError(where + ": expected a string");
  return j.get<std::string>();
}

Interval interval(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) throw FormatError(where + ": expected [lo, hi]");
  return {number(j[0], where), number(j[1], where)};
}

Correspondence record_from(const json& j, double default_beta, const std::string& where) {
  check_keys(j, {"a", "b", "beta"}, where);
  if (!j.contains("a") || !j.contains("b")) throw FormatError(where + ": record needs 'a' and 'b'");
  const double beta = j.contains("beta") ? number(j["beta"], where + " beta") : default_beta;
  if (!(beta > 0.0)) throw FormatError(where + ": beta must be > 0");
  return Correspondence(vec3_from(j["a"], where + " a"), vec3_from(j["b"], where + " b"), beta);
}

}  // namespace

json similarity_to_json(const Similarity& t) {
  json r = json::array();
  const Mat3& m = t.r.matrix();
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) r.push_back(m(i, k));
  const auto q = t.r.quaternion();
  return {{"s", t.s}, {"R", r}, {"q", json::array({q[0], q[1], q[2], q[3]})}, {"t", vec3_to(t.t)}};
}

Similarity similarity_from_json(const json& j) {
  check_keys(j, {"s", "R", "q", "t"}, "transform");
  if (!j.contains("s") || !j.contains("R") || !j.contains("t"))
    throw FormatError("transform: needs 's', 'R' and 't'");
  const json& r = j["R"];
  if (!r.is_array() || r.size() != 9) throw FormatError("transform: R must have 9 entries");
  Mat3 m;
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) m(i, k) = number(r[static_cast<std::size_t>(3 * i + k)], "transform R");
  try {
    return Similarity(number(j["s"], "transform s"), Rotation(m), vec3_from(j["t"], "transform t"));
  } catch (const InvalidInput& e) {
    throw FormatError(std::string("transform: ") + e.what());
  }
}

CorrespondenceFile read_correspondences(std::istream& in, double default_beta) {
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string content = buf.str();
  CorrespondenceFile out;

  auto take_document = [&](const json& doc) {
    const json* list = &doc;
    if (doc.is_object()) {
      check_keys(doc, {"correspondences", "truth"}, "correspondence document");
      if (doc.contains("truth")) out.truth = similarity_from_json(doc["truth"]);
      list = &doc["correspondences"];
    }
    if (!list->is_array()) throw FormatError("correspondence document: expected a list of records");
    for (std::size_t k = 0; k < list->size(); ++k)
      out.correspondences.push_back(record_from((*list)[k], default_beta, "record " + std::to_string(k)));
  };

  const auto first = content.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return out;
  if (content[first] == '[') {
    try {
      take_document(json::parse(content));
    } catch (const json::exception& e) {
      throw FormatError(std::string("correspondence document: ") + e.what());
    }
    return out;
  }
  // A single object spanning lines with a "correspondences" list.
  try {
    const json doc = json::parse(content);
    if (doc.is_object() && doc.contains("correspondences")) {
      take_document(doc);
      return out;
    }
  } catch (const json::exception&) {
    // not a single document; fall through to line records
  }

  std::istringstream lines(content);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "line " + std::to_string(line_no);
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::exception& e) {
      throw FormatError(where + ": " + e.what());
    }
    if (rec.is_object() && rec.contains("truth")) {
      check_keys(rec, {"truth"}, where);
      out.truth = similarity_from_json(rec["truth"]);
      continue;
    }
    out.correspondences.push_back(record_from(rec, default_beta, where));
  }
  return out;
}

CorrespondenceFile read_correspondences(const std::filesystem::path& path, double default_beta) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  try {
    return read_correspondences(in, default_beta);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_correspondences(std::ostream& out, const std::vector<Correspondence>& corrs,
                           const std::optional<Similarity>& truth) {
  if (truth) out << json{{"truth", similarity_to_json(*truth)}}.dump() << '\n';
  for (const auto& c : corrs)
    out << json{{"a", vec3_to(c.a)}, {"b", vec3_to(c.b)}, {"beta", c.beta}}.dump() << '\n';
}

void apply_gmcr(const json& j, GmcrConfig& cfg) {
  check_keys(j,
             {"c", "beta_default", "fixed_scale", "rotation_mode", "tim_mode", "min_tim_norm",
              "tim_survival_min", "clique_time_budget_ms", "refit_final"},
             "gmcr");
  const std::string w = "gmcr.";
  if (j.contains("c")) cfg.c = InlierThreshold(number(j["c"], w + "c"));
  if (j.contains("beta_default")) cfg.beta_default = number(j["beta_default"], w + "beta_default");
  if (j.contains("fixed_scale")) {
    if (j["fixed_scale"].is_null())
      cfg.fixed_scale.reset();
    else
      cfg.fixed_scale = number(j["fixed_scale"], w + "fixed_scale");
  }
  if (j.contains("rotation_mode")) {
    const auto m = text(j["rotation_mode"], w + "rotation_mode");
    if (m == "tight")
      cfg.rotation_mode = RotationTestMode::tight;
    else if (m == "paper_band")
      cfg.rotation_mode = RotationTestMode::paper_band;
    else
      throw FormatError(w + "rotation_mode: expected tight or paper_band");
  }
  if (j.contains("tim_mode")) {
    const json& tm = j["tim_mode"];
    if (tm.is_string() && tm.get<std::string>() == "all_pairs") {
      cfg.tim_mode = TimMode::all_pairs();
    } else if (tm.is_object()) {
      check_keys(tm, {"complete_limit", "seed"}, w + "tim_mode");
      if (!tm.contains("complete_limit")) throw FormatError(w + "tim_mode: needs complete_limit");
      cfg.tim_mode = TimMode::complete_limit(count(tm["complete_limit"], w + "tim_mode.complete_limit"),
                                             tm.contains("seed") ? tm["seed"].get<std::uint64_t>() : 0);
    } else {
      throw FormatError(w + "tim_mode: expected \"all_pairs\" or {\"complete_limit\": K}");
    }
  }
  if (j.contains("min_tim_norm")) cfg.min_tim_norm = number(j["min_tim_norm"], w + "min_tim_norm");
  if (j.contains("tim_survival_min"))
    cfg.tim_survival_min = count(j["tim_survival_min"], w + "tim_survival_min");
  if (j.contains("clique_time_budget_ms")) {
    if (j["clique_time_budget_ms"].is_null())
      cfg.clique_time_budget.reset();
    else
      cfg.clique_time_budget =
          std::chrono::milliseconds(count(j["clique_time_budget_ms"], w + "clique_time_budget_ms"));
  }
  if (j.contains("refit_final")) cfg.refit_final = boolean(j["refit_final"], w + "refit_final");
  try {
    cfg.validate();
  } catch (const InvalidInput& e) {
    throw FormatError(std::string("gmcr: ") + e.what());
  }
}

void apply_ransac(const json& j, RansacConfig& cfg) {
  check_keys(j, {"max_iterations", "confidence", "fixed_iterations", "seed"}, "ransac");
  if (j.contains("max_iterations")) cfg.max_iterations = count(j["max_iterations"], "ransac.max_iterations");
  if (j.contains("confidence")) cfg.confidence = number(j["confidence"], "ransac.confidence");
  if (j.contains("fixed_iterations")) {
    if (j["fixed_iterations"].is_null())
      cfg.fixed_iterations.reset();
    else
      cfg.fixed_iterations = count(j["fixed_iterations"], "ransac.fixed_iterations");
  }
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (cfg.max_iterations < 1) throw FormatError("ransac.max_iterations must be >= 1");
  if (!(cfg.confidence > 0.0 && cfg.confidence < 1.0))
    throw FormatError("ransac.confidence must be in (0, 1)");
}

void apply_synthetic(const json& j, SyntheticConfig& cfg) {
  check_keys(j,
             {"n_model_points", "shape", "ply_path", "noise_half_width", "n_sphere_outlier_points",
              "n_correspondences", "outlier_rate", "outlier_model", "n_bases", "base_sigma",
              "nearest_neighbor_inliers", "beta", "scale_range", "translation_range", "rotation_model",
              "seed"},
             "synthetic");
  const std::string w = "synthetic.";
  if (j.contains("n_model_points")) cfg.n_model_points = count(j["n_model_points"], w + "n_model_points");
  if (j.contains("shape")) {
    const auto s = text(j["shape"], w + "shape");
    static const std::map<std::string, Shape> shapes{{"sphere", Shape::sphere},
                                                     {"cube", Shape::cube},
                                                     {"blob_mixture", Shape::blob_mixture},
                                                     {"ply_file", Shape::ply_file}};
    const auto it = shapes.find(s);
    if (it == shapes.end()) throw FormatError(w + "shape: unknown '" + s + "'");
    cfg.shape = it->second;
  }
  if (j.contains("ply_path")) cfg.ply_path = text(j["ply_path"], w + "ply_path");
  if (j.contains("noise_half_width")) cfg.noise_half_width = number(j["noise_half_width"], w + "noise_half_width");
  if (j.contains("n_sphere_outlier_points"))
    cfg.n_sphere_outlier_points = count(j["n_sphere_outlier_points"], w + "n_sphere_outlier_points");
  if (j.contains("n_correspondences"))
    cfg.n_correspondences = count(j["n_correspondences"], w + "n_correspondences");
  if (j.contains("outlier_rate")) cfg.outlier_rate = number(j["outlier_rate"], w + "outlier_rate");
  if (j.contains("outlier_model")) {
    const auto m = text(j["outlier_model"], w + "outlier_model");
    if (m == "random")
      cfg.outlier_model = OutlierModel::random;
    else if (m == "structured")
      cfg.outlier_model = OutlierModel::structured;
    else
      throw FormatError(w + "outlier_model: expected random or structured");
  }
  if (j.contains("n_bases")) cfg.n_bases = count(j["n_bases"], w + "n_bases");
  if (j.contains("base_sigma")) cfg.base_sigma = number(j["base_sigma"], w + "base_sigma");
  if (j.contains("nearest_neighbor_inliers"))
    cfg.nearest_neighbor_inliers = boolean(j["nearest_neighbor_inliers"], w + "nearest_neighbor_inliers");
  if (j.contains("beta")) {
    if (j["beta"].is_null())
      cfg.beta.reset();
    else
      cfg.beta = number(j["beta"], w + "beta");
  }
  if (j.contains("scale_range")) cfg.scale_range = interval(j["scale_range"], w + "scale_range");
  if (j.contains("translation_range"))
    cfg.translation_range = interval(j["translation_range"], w + "translation_range");
  if (j.contains("rotation_model")) {
    const auto m = text(j["rotation_model"], w + "rotation_model");
    if (m == "full_so3")
      cfg.rotation_model = RotationModel::full_so3;
    else if (m == "z_axis_only")
      cfg.rotation_model = RotationModel::z_axis_only;
    else
      throw FormatError(w + "rotation_model: expected full_so3 or z_axis_only");
  }
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  try {
    cfg.validate();
  } catch (const InvalidInput& e) {
    throw FormatError(e.what());
  }
}

RunConfig parse_run_config(const json& j) {
  check_keys(j, {"gmcr", "ransac", "synthetic"}, "config");
  RunConfig cfg;
  if (j.contains("gmcr")) apply_gmcr(j["gmcr"], cfg.gmcr);
  if (j.contains("ransac")) apply_ransac(j["ransac"], cfg.ransac);
  if (j.contains("synthetic")) apply_synthetic(j["synthetic"], cfg.synthetic);
  return cfg;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

RunConfig read_run_config(const std::filesystem::path& path) {
  try {
    return parse_run_config(read_json_file(path));
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

BenchmarkSuite parse_suite(const json& j) {
  check_keys(j,
             {"base_seed", "runs", "methods", "success_threshold_m", "gmcr", "ransac", "synthetic",
              "cells", "sweep"},
             "suite");
  BenchmarkSuite suite;
  if (j.contains("base_seed")) suite.base_seed = j["base_seed"].get<std::uint64_t>();
  if (j.contains("runs")) suite.runs_per_cell = count(j["runs"], "suite.runs");
  if (j.contains("success_threshold_m"))
    suite.success_threshold_m = number(j["success_threshold_m"], "suite.success_threshold_m");
  if (j.contains("methods")) {
    suite.methods.clear();
    for (const auto& m : j["methods"]) {
      const auto id = text(m, "suite.methods");
      if (id != "gmcr" && id != "gmcr_band" && id != "ransac" && id != "ransac10k")
        throw FormatError("suite.methods: unknown method '" + id + "'");
      suite.methods.push_back(id);
    }
  }
  if (suite.methods.empty()) throw FormatError("suite.methods: empty");
  if (j.contains("gmcr")) apply_gmcr(j["gmcr"], suite.gmcr);
  if (j.contains("ransac")) apply_ransac(j["ransac"], suite.ransac);

  const json base = j.value("synthetic", json::object());
  std::vector<json> cells;
  if (j.contains("cells")) {
    if (!j["cells"].is_array() || j["cells"].empty()) throw FormatError("suite.cells: expected a nonempty list");
    for (const auto& c : j["cells"]) {
      json merged = base;
      if (!c.is_object()) throw FormatError("suite.cells: expected objects");
      merged.update(c);
      cells.push_back(merged);
    }
  } else {
    cells.push_back(base);
  }
  if (j.contains("sweep")) {
    const json& sw = j["sweep"];
    if (!sw.is_object()) throw FormatError("suite.sweep: expected an object of lists");
    for (const auto& [key, values] : sw.items()) {
      if (!values.is_array() || values.empty())
        throw FormatError("suite.sweep." + key + ": expected a nonempty list");
      std::vector<json> next;
      for (const auto& cell : cells)
        for (const auto& v : values) {
          json c = cell;
          c[key] = v;
          next.push_back(std::move(c));
        }
      cells = std::move(next);
    }
  }
  for (const auto& c : cells) {
    SyntheticConfig sc;
    apply_synthetic(c, sc);
    suite.configs.push_back(sc);
  }
  return suite;
}

BenchmarkSuite read_suite(const std::filesystem::path& path) {
  try {
    return parse_suite(read_json_file(path));
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

json stage_to_json(const StageReport& stage, bool timings) {
  json j{{"nodes", stage.measurements},
         {"edges", stage.stats.edges},
         {"density", stage.stats.density},
         {"degeneracy", stage.stats.degeneracy},
         {"clique_size", stage.clique.nodes.size()},
         {"exact", stage.clique.exact}};
  if (timings)
    j["timings_ms"] = {{"graph", stage.graph_ms}, {"clique", stage.clique_ms}, {"total", stage.total_ms}};
  return j;
}

json gmcr_result_to_json(const RegistrationResult& res, bool timings) {
  json j{{"transform", similarity_to_json(res.transform)}};
  j["inliers"] = res.inliers;
  j["stages"] = {{"scale", stage_to_json(res.scale, timings)},
                 {"consistency", stage_to_json(res.consistency, timings)},
                 {"rotation", stage_to_json(res.rotation, timings)},
                 {"translation", stage_to_json(res.translation, timings)}};
  j["dropped_short_tims"] = res.dropped_short_tims;
  j["infeasible_tims"] = res.infeasible_tims;
  j["refit"] = res.refit;
  if (timings) j["total_ms"] = res.total_ms;
  return j;
}

json ransac_result_to_json(const RansacResult& res) {
  json j{{"transform", similarity_to_json(res.transform)}};
  j["inliers"] = res.inliers;
  j["iterations"] = res.iterations;
  return j;
}

}  // namespace gmcr::io
