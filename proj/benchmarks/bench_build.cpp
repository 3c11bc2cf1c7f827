// Build-time benchmarks: accelerated vs brute-force construction and the
// underlying index operations, on clustered synthetic data where pruning
// has something to bite on.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <string>
#include <vector>

#include "orient/ball_tree.hpp"
#include "orient/builder.hpp"
#include "orient/rng.hpp"
#include "orient/types.hpp"

namespace {

struct Instance {
  orient::EmbeddingSet embedding;
  orient::PowerAssignment power;
};

// Points drawn around a few hundred well-separated centers, powers zipf-ish:
// roughly the structure real embeddings have.
Instance clustered_instance(std::size_t n, std::size_t d, std::uint64_t seed) {
  orient::Rng rng(seed);
  const std::size_t n_centers = std::max<std::size_t>(1, n / 64);
  std::vector<double> centers(n_centers * d);
  for (auto& c : centers) {
    c = rng.gaussian() * 10.0;
  }
  std::vector<std::string> labels(n);
  std::vector<double> data(n * d);
  std::vector<double> raw(n);
  for (std::size_t i = 0; i < n; ++i) {
    labels[i] = "e" + std::to_string(i);
    const std::size_t c = rng.bounded(n_centers);
    for (std::size_t j = 0; j < d; ++j) {
      data[i * d + j] = centers[c * d + j] + rng.gaussian() * 0.5;
    }
    raw[i] = static_cast<double>(n) / static_cast<double>(i + 1);
  }
  return {orient::validate_embedding_flat(std::move(labels), std::move(data), d),
          orient::PowerAssignment::from_raw(std::move(raw),
                                            orient::PowerProvider::zipf)};
}

void bench_build(benchmark::State& state, bool accelerated) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto inst = clustered_instance(n, 50, 7);
  orient::BuildConfig cfg;
  cfg.accelerated = accelerated;
  for (auto _ : state) {
    auto tree = orient::build_arborescence(inst.embedding, inst.power, cfg);
    benchmark::DoNotOptimize(tree.parent.data());
  }
  state.SetComplexityN(state.range(0));
}

void BM_BuildAccelerated(benchmark::State& state) { bench_build(state, true); }
void BM_BuildBrute(benchmark::State& state) { bench_build(state, false); }

void BM_IndexConstruction(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto inst = clustered_instance(n, 50, 7);
  for (auto _ : state) {
    orient::BallTree index(inst.embedding, inst.power);
    benchmark::DoNotOptimize(index.node_count());
  }
}

void BM_NearestQuery(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto inst = clustered_instance(n, 50, 7);
  orient::BallTree index(inst.embedding, inst.power);
  for (std::size_t i = 0; i < n; ++i) {
    index.activate(static_cast<int>(i));
  }
  orient::Rng rng(11);
  for (auto _ : state) {
    const auto q = inst.embedding.row(rng.bounded(n));
    const auto hit = index.nearest_active(q, orient::DistanceKind::euclidean);
    benchmark::DoNotOptimize(hit.entity);
  }
}

}  // namespace

BENCHMARK(BM_BuildAccelerated)->Arg(2000)->Arg(8000)->Arg(20000)
    ->Unit(benchmark::kMillisecond)->Complexity();
BENCHMARK(BM_BuildBrute)->Arg(2000)->Arg(8000)
    ->Unit(benchmark::kMillisecond)->Complexity();
BENCHMARK(BM_IndexConstruction)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NearestQuery)->Arg(20000);

BENCHMARK_MAIN();
