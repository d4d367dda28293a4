// Parallel kernels against their serial references on synthetic inputs.
#include "gmcr/consensus.hpp"
#include "gmcr/graph.hpp"
#include "gmcr/invariants.hpp"
#include "gmcr/synthbench.hpp"

#include <benchmark/benchmark.h>

namespace {

gmcr::ProblemInstance instance(std::size_t n_corr, double rate) {
  gmcr::SyntheticConfig cfg;
  cfg.n_correspondences = n_corr;
  cfg.outlier_rate = rate;
  cfg.seed = 7;
  return gmcr::generate_synthetic(cfg);
}

std::vector<gmcr::ScaleMeasurement> scale_items(const gmcr::ProblemInstance& inst) {
  return gmcr::scale_measurements(gmcr::build_tims(inst.correspondences)).items;
}

void BM_BuildTims(benchmark::State& st) {
  const auto inst = instance(static_cast<std::size_t>(st.range(0)), 0.5);
  for (auto _ : st) benchmark::DoNotOptimize(gmcr::build_tims(inst.correspondences));
}

void BM_BuildTimsSerial(benchmark::State& st) {
  const auto inst = instance(static_cast<std::size_t>(st.range(0)), 0.5);
  for (auto _ : st) benchmark::DoNotOptimize(gmcr::build_tims_serial(inst.correspondences));
}

void BM_ScaleGraph(benchmark::State& st) {
  const auto items = scale_items(instance(static_cast<std::size_t>(st.range(0)), 0.5));
  const gmcr::InlierThreshold c(1.0);
  for (auto _ : st)
    benchmark::DoNotOptimize(gmcr::build_graph(
        items.size(), [&](std::size_t i, std::size_t j) { return gmcr::scale_consensus(items[i], items[j], c); }));
}

void BM_ScaleGraphSerial(benchmark::State& st) {
  const auto items = scale_items(instance(static_cast<std::size_t>(st.range(0)), 0.5));
  const gmcr::InlierThreshold c(1.0);
  for (auto _ : st)
    benchmark::DoNotOptimize(gmcr::build_graph_serial(
        items.size(), [&](std::size_t i, std::size_t j) { return gmcr::scale_consensus(items[i], items[j], c); }));
}

void BM_ScaleClique(benchmark::State& st) {
  const double rate = static_cast<double>(st.range(1)) / 100.0;
  const auto items = scale_items(instance(static_cast<std::size_t>(st.range(0)), rate));
  const gmcr::InlierThreshold c(1.0);
  const auto g = gmcr::build_graph(
      items.size(), [&](std::size_t i, std::size_t j) { return gmcr::scale_consensus(items[i], items[j], c); });
  for (auto _ : st) benchmark::DoNotOptimize(gmcr::max_clique(g));
}

}  // namespace

BENCHMARK(BM_BuildTims)->Arg(60)->Arg(200);
BENCHMARK(BM_BuildTimsSerial)->Arg(60)->Arg(200);
BENCHMARK(BM_ScaleGraph)->Arg(60)->Arg(90);
BENCHMARK(BM_ScaleGraphSerial)->Arg(60)->Arg(90);
BENCHMARK(BM_ScaleClique)->Args({60, 20})->Args({60, 80})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
