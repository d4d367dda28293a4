#include "gmcr/commands.hpp"

#include "gmcr/io.hpp"
#include "gmcr/pipeline.hpp"
#include "gmcr/ply.hpp"
#include "gmcr/solvers.hpp"
#include "gmcr/synthbench.hpp"

#include <CLI11.hpp>
#include <omp.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace gmcr {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RegisterArgs {
  std::string correspondences;
  std::string config;
  std::string method = "gmcr";
  std::optional<double> fixed_scale;
  std::string out;
  std::optional<std::uint64_t> seed;
  bool timings = false;
  std::string dump_graphs;
};

struct BenchArgs {
  std::string suite;
  std::string out;
  std::optional<std::size_t> runs;
  std::optional<std::uint64_t> seed;
  bool no_runtime = false;
};

struct GenerateArgs {
  std::string config;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
};

// Writes to `path` when given, otherwise to `out`.
void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw io::FormatError("cannot write " + path);
  f << text;
  if (!f) throw io::FormatError("write failed for " + path);
}

int cmd_register(const RegisterArgs& a, std::ostream& out, std::ostream& err) {
  io::RunConfig cfg;
  if (!a.config.empty()) cfg = io::read_run_config(a.config);
  if (a.fixed_scale) {
    if (!(*a.fixed_scale > 0.0)) throw io::FormatError("--fixed-scale must be > 0");
    cfg.gmcr.fixed_scale = *a.fixed_scale;
  }
  if (a.seed) cfg.ransac.seed = *a.seed;

  const auto file = io::read_correspondences(fs::path(a.correspondences), cfg.gmcr.beta_default);
  const auto& corrs = file.correspondences;
  if (corrs.size() < 3) {
    err << "register: insufficient input, need at least 3 correspondences (got " << corrs.size()
        << ")\n";
    return kExitRegistration;
  }

  json result;
  if (a.method == "gmcr" || a.method == "gmcr_band") {
    GmcrConfig g = cfg.gmcr;
    if (a.method == "gmcr_band") g.rotation_mode = RotationTestMode::paper_band;
    if (!a.dump_graphs.empty()) {
      fs::create_directories(a.dump_graphs);
      const fs::path dir = a.dump_graphs;
      g.graph_sink = [dir](const std::string& stage, const ConsensusGraph& graph) {
        std::ofstream f(dir / (stage + ".edges"));
        write_edge_list(f, graph);
      };
    }
    try {
      const auto res = gmcr_register(corrs, g);
      result = io::gmcr_result_to_json(res, a.timings);
      result["method"] = a.method;
    } catch (const RegistrationFailure& e) {
      err << "register: registration failed at stage '" << e.stage() << "': " << e.what() << '\n';
      return kExitRegistration;
    }
  } else {
    RansacConfig r = cfg.ransac;
    if (a.method == "ransac10k") r.fixed_iterations = 10000;
    try {
      result = io::ransac_result_to_json(ransac_register(corrs, r, cfg.gmcr.c));
      result["method"] = a.method;
    } catch (const DegenerateGeometry& e) {
      err << "register: registration failed: " << e.what() << '\n';
      return kExitRegistration;
    }
  }
  emit(a.out, result.dump() + "\n", out);
  return kExitOk;
}

int cmd_bench(const BenchArgs& a, std::ostream& out, std::ostream& err) {
  BenchmarkSuite suite = io::read_suite(a.suite);
  if (a.runs) suite.runs_per_cell = *a.runs;
  if (a.seed) suite.base_seed = *a.seed;
  suite.record_runtime = !a.no_runtime;
  std::ostringstream csv;
  const auto rows = run_benchmark(suite, &csv);
  emit(a.out, csv.str(), out);
  const auto failed = std::count_if(rows.begin(), rows.end(), [](const BenchRow& r) { return r.failed; });
  if (failed > 0) err << "bench: " << failed << " of " << rows.size() << " cells failed\n";
  return kExitOk;
}

int cmd_generate(const GenerateArgs& a, std::ostream& out, std::ostream& /*err*/) {
  SyntheticConfig sc;
  if (!a.config.empty()) sc = io::read_run_config(a.config).synthetic;
  if (a.seed) sc.seed = *a.seed;
  const auto inst = generate_synthetic(sc);

  const fs::path dir = a.out_dir;
  fs::create_directories(dir);
  write_ply(dir / "source.ply", inst.source);
  write_ply(dir / "target.ply", inst.target);
  {
    std::ofstream f(dir / "correspondences.jsonl", std::ios::binary);
    io::write_correspondences(f, inst.correspondences, inst.truth);
    if (!f) throw io::FormatError("write failed for correspondences.jsonl");
  }
  emit((dir / "truth.json").string(), io::similarity_to_json(inst.truth).dump() + "\n", out);
  json mask = json::array();
  for (bool b : inst.inlier_mask) mask.push_back(b);
  emit((dir / "inlier_mask.json").string(), mask.dump() + "\n", out);
  return kExitOk;
}

std::optional<int> threads_from_env() {
  const char* v = std::getenv("GMCR_THREADS");
  if (!v || !*v) return std::nullopt;
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (*end != '\0' || n < 1) throw io::FormatError("GMCR_THREADS must be a positive integer");
  return static_cast<int>(n);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Graph-based maximum consensus registration"};
  app.require_subcommand(1);
  std::optional<int> threads;
  app.add_option("--threads", threads, "worker threads (default: GMCR_THREADS or hardware count)")
      ->check(CLI::PositiveNumber);

  RegisterArgs reg;
  auto* r = app.add_subcommand("register", "estimate a similarity transform from correspondences");
  r->add_option("--correspondences", reg.correspondences, "correspondence file")->required();
  r->add_option("--config", reg.config, "JSON run configuration");
  r->add_option("--method", reg.method)->check(CLI::IsMember({"gmcr", "gmcr_band", "ransac", "ransac10k"}));
  r->add_option("--fixed-scale", reg.fixed_scale, "skip scale estimation and use this scale");
  r->add_option("--out", reg.out, "result file (default: stdout)");
  r->add_option("--seed", reg.seed, "RANSAC seed");
  r->add_flag("--timings", reg.timings, "include wall-clock timings in the result");
  r->add_option("--dump-graphs", reg.dump_graphs, "write each stage graph as an edge list into DIR");

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "run a synthetic benchmark suite");
  b->add_option("--suite", bench.suite, "JSON suite file")->required();
  b->add_option("--out", bench.out, "CSV output file")->required();
  b->add_option("--runs", bench.runs, "runs per cell");
  b->add_option("--seed", bench.seed, "base seed");
  b->add_flag("--no-runtime", bench.no_runtime, "write runtime_ms as 0");

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "write one synthetic instance");
  g->add_option("--config", gen.config, "JSON run configuration (synthetic section)");
  g->add_option("--out-dir", gen.out_dir, "output directory")->required();
  g->add_option("--seed", gen.seed, "generator seed");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (!threads) threads = threads_from_env();
    if (threads) omp_set_num_threads(*threads);
    if (r->parsed()) return cmd_register(reg, out, err);
    if (b->parsed()) return cmd_bench(bench, out, err);
    return cmd_generate(gen, out, err);
  } catch (const io::FormatError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const PlyError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << '\n';
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
  }
  return kExitUsage;
}

}  // namespace gmcr
