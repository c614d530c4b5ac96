#include <benchmark/benchmark.h>

#include <random>

#include "genreflow/tfidf.hpp"

using namespace genreflow;

namespace {

std::vector<std::vector<std::string>> documents(std::size_t count, std::size_t length) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> word(0, 4999);
  std::vector<std::vector<std::string>> docs(count);
  for (auto& d : docs) {
    for (std::size_t i = 0; i < length; ++i) d.push_back("w" + std::to_string(word(rng)));
  }
  return docs;
}

void BM_TfidfFit(benchmark::State& state) {
  const auto docs = documents(static_cast<std::size_t>(state.range(0)), 200);
  for (auto _ : state) benchmark::DoNotOptimize(fit_tfidf(docs));
}
BENCHMARK(BM_TfidfFit)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_TfidfTransform(benchmark::State& state) {
  const auto docs = documents(1000, 200);
  const auto model = fit_tfidf(docs);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(model.transform(docs[i++ % docs.size()]));
}
BENCHMARK(BM_TfidfTransform);

}  // namespace

BENCHMARK_MAIN();
