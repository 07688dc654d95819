#include <benchmark/benchmark.h>

#include "tabrec/assignment.hpp"
#include "tabrec/fusion.hpp"
#include "tabrec/pipeline.hpp"
#include "tabrec/synthetic.hpp"

namespace {

using namespace tabrec;

Engine& engine() {
  static Engine e = [] {
    ExperimentConfig cfg;
    cfg.variant = "CRAB-2";
    Engine eng(cfg);
    SyntheticSpec spec;
    spec.tables = 120;
    spec.topics = 6;
    eng.adopt(make_synthetic_collection(spec));
    return eng;
  }();
  return e;
}

void BM_Bm25Search(benchmark::State& state) {
  Engine& e = engine();
  std::vector<std::string> query = {"clan3", "common5", "name"};
  for (auto _ : state) {
    benchmark::DoNotOptimize(e.index().bm25_search(query, Field::Catchall, 150));
  }
}
BENCHMARK(BM_Bm25Search);

void BM_CandidatePool(benchmark::State& state) {
  Engine& e = engine();
  for (auto _ : state) {
    benchmark::DoNotOptimize(e.pool("t0x0"));
  }
}
BENCHMARK(BM_CandidatePool);

void BM_CrabPairFeatures(benchmark::State& state) {
  Engine& e = engine();
  auto extractor = e.make_extractor();
  const TableRepr& a = e.cached_repr("t0x0", extractor);
  const TableRepr& b = e.cached_repr("t0x1", extractor);
  for (auto _ : state) {
    benchmark::DoNotOptimize(extractor.extract(a, b));
  }
}
BENCHMARK(BM_CrabPairFeatures);

void BM_BipartiteMatching6x6(benchmark::State& state) {
  std::vector<std::vector<double>> w(6, std::vector<double>(6));
  std::uint64_t x = 12345;
  for (auto& row : w) {
    for (auto& v : row) {
      x = x * 6364136223846793005ull + 1442695040888963407ull;
      v = static_cast<double>(x >> 11) / 9007199254740992.0;
    }
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(max_weight_bipartite_matching(w, 0.3));
  }
}
BENCHMARK(BM_BipartiteMatching6x6);

}  // namespace

BENCHMARK_MAIN();
