#include <benchmark/benchmark.h>

#include <random>

#include "genreflow/metrics.hpp"

using namespace genreflow;

namespace {

std::vector<ScoredPrediction> predictions(std::size_t count) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<ScoredPrediction> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::string bits;
    for (std::size_t g = 0; g < kGenreCount; ++g) {
      out[i].scores[g] = u(rng);
      bits.push_back(u(rng) < 0.3 ? '1' : '0');
    }
    bits[i % kGenreCount] = '1';
    out[i].trailer_id = "p" + std::to_string(i);
    out[i].truth = LabelVector::from_bits(bits);
  }
  return out;
}

void BM_MicroAuPrc(benchmark::State& state) {
  const auto preds = predictions(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(micro_au_prc(preds));
}
BENCHMARK(BM_MicroAuPrc)->Arg(1000)->Arg(100000);

void BM_PerGenreAuPrc(benchmark::State& state) {
  const auto preds = predictions(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(per_genre_au_prc(preds));
}
BENCHMARK(BM_PerGenreAuPrc)->Arg(1000)->Arg(100000);

}  // namespace

BENCHMARK_MAIN();
