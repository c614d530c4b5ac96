#include <benchmark/benchmark.h>

#include "genreflow/models.hpp"
#include "genreflow/nn/adam.hpp"
#include "genreflow/nn/loss.hpp"

using namespace genreflow;
using namespace genreflow::nn;

namespace {

Tensor2 token_row(std::size_t length, std::size_t vocab) {
  Tensor2 t(1, length);
  for (std::size_t i = 0; i < length; ++i) t[i] = static_cast<double>((i * 7919) % (vocab + 1));
  return t;
}

void BM_EcnetPredict(benchmark::State& state) {
  const auto net = build_ecnet(10395, 330);
  const auto x = token_row(330, 10395);
  for (auto _ : state) benchmark::DoNotOptimize(net.predict(x));
}
BENCHMARK(BM_EcnetPredict)->Unit(benchmark::kMillisecond);

void BM_EcnetTrainStep(benchmark::State& state) {
  auto net = build_ecnet(10395, 330);
  const auto x = token_row(330, 10395);
  const auto labels = LabelVector::from_bits("10010");
  AdamState adam;
  Rng rng(1);
  for (auto _ : state) {
    net.zero_grad();
    const auto logits = net.forward_logits(x, Mode::Train, rng);
    std::vector<double> p(logits.size());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = sigmoid(logits[i]);
    net.backward(Tensor2::row_vector(bce_multilabel(p, labels).grad_logits));
    const auto params = net.parameters();
    adam_update(params, adam);
    net.mark_updated();
  }
}
BENCHMARK(BM_EcnetTrainStep)->Unit(benchmark::kMillisecond);

void BM_TfanetPredict(benchmark::State& state) {
  const auto net = build_tfanet(34684);
  Tensor2 x(1, 34684);
  for (std::size_t i = 0; i < x.size(); i += 97) x[i] = 0.1;
  for (auto _ : state) benchmark::DoNotOptimize(net.predict(x));
}
BENCHMARK(BM_TfanetPredict)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
