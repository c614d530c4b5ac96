#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "genreflow/models.hpp"
#include "genreflow/nn/layers.hpp"
#include "genreflow/nn/loss.hpp"
#include "oracles/finite_diff.hpp"

using namespace genreflow;
using namespace genreflow::nn;
using oracle::max_relative_error;
using oracle::numeric_gradient;

namespace {

constexpr double kTolerance = 1e-4;
constexpr int kConfigurations = 100;

// Values bounded away from zero so a relu kink never sits inside the
// finite-difference stencil.
Tensor2 random_tensor(std::size_t rows, std::size_t cols, Rng& rng) {
  std::uniform_real_distribution<double> mag(0.1, 1.0);
  Tensor2 t(rows, cols);
  for (auto& v : t.values()) v = (rng() & 1) ? mag(rng) : -mag(rng);
  return t;
}

// Distinct values spaced 0.01 apart so window maxima are never near-tied.
Tensor2 distinct_tensor(std::size_t rows, std::size_t cols, Rng& rng) {
  std::vector<double> v(rows * cols);
  std::iota(v.begin(), v.end(), 0.0);
  std::shuffle(v.begin(), v.end(), rng);
  for (auto& x : v) x = (x - static_cast<double>(v.size()) / 2) * 0.01 + 0.005;
  return Tensor2(rows, cols, std::move(v));
}

// Checks parameter and input gradients of f(x) = sum(w * layer(x)).
double layer_error(Layer& layer, Tensor2 input, Rng& rng, bool input_grad = true) {
  const Tensor2 probe = layer.infer(input);
  const Tensor2 weights = random_tensor(probe.rows(), probe.cols(), rng);
  auto objective = [&] {
    const Tensor2 out = layer.infer(input);
    double s = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) s += out[i] * weights[i];
    return s;
  };
  for (auto& p : layer.parameters()) p.grad.fill(0.0);
  layer.forward(input, Mode::Infer, rng);
  const Tensor2 analytic_input = layer.backward(weights, input_grad);

  double worst = 0.0;
  for (auto& p : layer.parameters()) {
    worst = std::max(worst, max_relative_error(p.grad, numeric_gradient(p.value, objective)));
  }
  if (input_grad) worst = std::max(worst, max_relative_error(analytic_input, numeric_gradient(input, objective)));
  return worst;
}

Tensor2 random_indices(std::size_t length, std::size_t vocab, Rng& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, vocab);
  Tensor2 t(1, length);
  for (auto& v : t.values()) v = static_cast<double>(pick(rng));
  return t;
}

LabelVector random_labels(Rng& rng) {
  std::string bits;
  for (std::size_t i = 0; i < kGenreCount; ++i) bits.push_back((rng() & 1) ? '1' : '0');
  return LabelVector::from_bits(bits);
}

double bce_of(const Tensor2& logits, const LabelVector& labels) {
  std::vector<double> p(logits.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = sigmoid(logits[i]);
  return bce_multilabel(p, labels).loss;
}

// Whole-network check: BCE loss through every parameter tensor.
double network_error(Network& net, const Tensor2& input, const LabelVector& labels, Rng& rng) {
  net.zero_grad();
  const Tensor2 logits = net.forward_logits(input, Mode::Infer, rng);
  std::vector<double> p(logits.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = sigmoid(logits[i]);
  const auto loss = bce_multilabel(p, labels);
  net.backward(Tensor2::row_vector(loss.grad_logits));
  auto objective = [&] { return bce_of(net.infer_logits(input), labels); };
  double worst = 0.0;
  for (auto* param : net.parameters()) {
    worst = std::max(worst, max_relative_error(param->grad, numeric_gradient(param->value, objective)));
  }
  return worst;
}

std::size_t between(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

}  // namespace

TEST(GradientCheck, EveryLayerAtToyDimensions) {
  Rng rng(20240601);
  const std::size_t V = 7, d = 4, L = 6, F = 3, k = 3, m = 5;
  Embedding emb(V, d, L, rng);
  EXPECT_LT(layer_error(emb, random_indices(L, V, rng), rng, false), kTolerance);
  Conv1dSame conv(d, F, k, rng);
  EXPECT_LT(layer_error(conv, random_tensor(L, d, rng), rng), kTolerance);
  MaxPool1d pool(2);
  EXPECT_LT(layer_error(pool, distinct_tensor(L, F, rng), rng), kTolerance);
  Flatten flat;
  EXPECT_LT(layer_error(flat, random_tensor(L / 2, F, rng), rng), kTolerance);
  Dense dense(L / 2 * F, m, rng);
  EXPECT_LT(layer_error(dense, random_tensor(1, L / 2 * F, rng), rng), kTolerance);
  Activation relu_layer(ActivationKind::Relu);
  EXPECT_LT(layer_error(relu_layer, random_tensor(L, F, rng), rng), kTolerance);
  Activation sigmoid_layer(ActivationKind::Sigmoid);
  EXPECT_LT(layer_error(sigmoid_layer, random_tensor(1, m, rng), rng), kTolerance);
}

TEST(GradientCheck, RandomLayerConfigurations) {
  Rng rng(77);
  double worst = 0.0;
  for (int trial = 0; trial < kConfigurations; ++trial) {
    const std::size_t V = between(rng, 1, 9), d = between(rng, 1, 5), L = between(rng, 2, 8);
    const std::size_t F = between(rng, 1, 4), k = 2 * between(rng, 0, 2) + 1, p = between(rng, 1, 3);
    const std::size_t m = between(rng, 1, 6);
    Embedding emb(V, d, L, rng);
    worst = std::max(worst, layer_error(emb, random_indices(L, V, rng), rng, false));
    Conv1dSame conv(d, F, k, rng);
    worst = std::max(worst, layer_error(conv, random_tensor(L, d, rng), rng));
    if (p <= L) {
      MaxPool1d pool(p);
      worst = std::max(worst, layer_error(pool, distinct_tensor(L, F, rng), rng));
    }
    Dense dense(L * F, m, rng);
    worst = std::max(worst, layer_error(dense, random_tensor(1, L * F, rng), rng));
    Activation relu_layer(ActivationKind::Relu);
    worst = std::max(worst, layer_error(relu_layer, random_tensor(1, m, rng), rng));
    Activation sigmoid_layer(ActivationKind::Sigmoid);
    worst = std::max(worst, layer_error(sigmoid_layer, random_tensor(L, F, rng), rng));
  }
  EXPECT_LT(worst, kTolerance);
}

TEST(GradientCheck, DropoutBackwardAppliesTheForwardMask) {
  Rng rng(5);
  Dropout drop(0.4);
  const Tensor2 x = random_tensor(1, 50, rng);
  const Tensor2 y = drop.forward(x, Mode::Train, rng);
  const Tensor2 g = random_tensor(1, 50, rng);
  const Tensor2 back = drop.backward(g);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_DOUBLE_EQ(back[i], g[i] * (y[i] / x[i]));
}

TEST(GradientCheck, WholeToyEcnet) {
  Rng rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    ModelConfig cfg = ModelConfig::ecnet(7, 6);
    cfg.embedding_dim = 4;
    cfg.conv_filters = 3;
    cfg.kernel_width = 3;
    cfg.hidden_units = {5};
    cfg.seed = static_cast<std::uint64_t>(trial + 1);
    auto net = build_ecnet(cfg);
    EXPECT_LT(network_error(net, random_indices(6, 7, rng), random_labels(rng), rng), kTolerance) << trial;
  }
}

TEST(GradientCheck, WholeToyTfanet) {
  Rng rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    ModelConfig cfg = ModelConfig::tfanet(9);
    cfg.hidden_units = {6, 4};
    cfg.seed = static_cast<std::uint64_t>(trial + 1);
    auto net = build_tfanet(cfg);
    EXPECT_LT(network_error(net, random_tensor(1, 9, rng), random_labels(rng), rng), kTolerance) << trial;
  }
}

TEST(GradientCheck, ZeroLossGradientGivesZeroGradients) {
  auto net = build_tfanet(ModelConfig::tfanet(4));
  Rng rng(3);
  net.zero_grad();
  net.forward_logits(Tensor2::row_vector({0.1, 0.2, 0.3, 0.4}), Mode::Train, rng);
  net.backward(Tensor2(1, kGenreCount));
  for (const auto* p : std::as_const(net).parameters()) {
    for (double g : p->grad.values()) EXPECT_EQ(g, 0.0);
  }
}

TEST(GradientCheck, IdenticalInputsGiveIdenticalGradients) {
  auto a = build_ecnet(ModelConfig::ecnet(7, 6));
  auto b = build_ecnet(ModelConfig::ecnet(7, 6));
  Rng ra(1), rb(1);
  const auto x = Tensor2::row_vector({1, 2, 3, 0, 7, 7});
  const auto g = Tensor2::row_vector({0.1, -0.2, 0.3, 0, 0.05});
  a.forward_logits(x, Mode::Train, ra);
  a.backward(g);
  b.forward_logits(x, Mode::Train, rb);
  b.backward(g);
  const auto pa = std::as_const(a).parameters(), pb = std::as_const(b).parameters();
  for (std::size_t i = 0; i < pa.size(); ++i) EXPECT_EQ(pa[i]->grad, pb[i]->grad);
}
