#include <benchmark/benchmark.h>

#include <map>
#include <random>
#include <string>
#include <vector>

#include "mtaudit/kernels.hpp"

using namespace mtaudit;

namespace {

struct Batch {
  std::vector<std::string> hyps;
  std::vector<std::string> refs;
};

// Synthetic aligned pairs: references of 10-40 words, hypotheses that keep
// most reference words and substitute the rest.
const Batch& batch(std::size_t n) {
  static std::map<std::size_t, Batch> cache;
  auto& b = cache[n];
  if (!b.hyps.empty()) return b;
  std::mt19937 rng(99);
  std::uniform_int_distribution<int> len(10, 40), word(0, 4999), keep(0, 9);
  for (std::size_t i = 0; i < n; ++i) {
    std::string h, r;
    const int words = len(rng);
    for (int w = 0; w < words; ++w) {
      const std::string tok = "w" + std::to_string(word(rng));
      r += (w ? " " : "") + tok;
      h += (w ? " " : "") + (keep(rng) < 7 ? tok : "x" + std::to_string(word(rng)));
    }
    b.hyps.push_back(std::move(h));
    b.refs.push_back(std::move(r));
  }
  return b;
}

Exec exec_of(const benchmark::State& state) { return state.range(1) ? Exec::Parallel : Exec::Serial; }

void BM_CorpusBleu(benchmark::State& state) {
  const auto& b = batch(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::corpus_bleu(b.hyps, b.refs, {}, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_CorpusChrf(benchmark::State& state) {
  const auto& b = batch(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::corpus_chrf(b.hyps, b.refs, {}, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_CorpusCer(benchmark::State& state) {
  const auto& b = batch(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::corpus_cer(b.hyps, b.refs, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_CorpusTerShifts(benchmark::State& state) {
  const auto& b = batch(static_cast<std::size_t>(state.range(0)));
  metrics::TerConfig cfg;
  cfg.shifts = true;
  for (auto _ : state) benchmark::DoNotOptimize(kernels::corpus_ter(b.hyps, b.refs, cfg, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

// Second argument: 0 serial reference, 1 OpenMP.
#define MTAUDIT_BENCH(fn) \
  BENCHMARK(fn)->ArgNames({"pairs", "parallel"})->ArgsProduct({{1000, 10000}, {0, 1}})->Unit(benchmark::kMillisecond)

MTAUDIT_BENCH(BM_CorpusBleu);
MTAUDIT_BENCH(BM_CorpusChrf);
MTAUDIT_BENCH(BM_CorpusCer);
MTAUDIT_BENCH(BM_CorpusTerShifts);

}  // namespace

BENCHMARK_MAIN();
