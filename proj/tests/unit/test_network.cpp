#include <gtest/gtest.h>

#include "genreflow/error.hpp"
#include "genreflow/models.hpp"
#include "genreflow/nn/network.hpp"

using namespace genreflow;
using namespace genreflow::nn;

namespace {

ErrorCode error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(Network, ReferenceEcnetShapeChain) {
  auto net = build_ecnet(10395, 330);
  const auto rows = net.summary();
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows[0].output, (Shape{{330, 64}}));
  EXPECT_EQ(rows[1].output, (Shape{{330, 64}}));
  EXPECT_EQ(rows[2].output, (Shape{{165, 64}}));
  EXPECT_EQ(rows[3].output, (Shape{{10560}}));
  EXPECT_EQ(rows[4].output, (Shape{{32}}));
  EXPECT_EQ(rows[5].output, (Shape{{5}}));
  EXPECT_EQ(rows[1].activation, ActivationKind::Relu);
  EXPECT_EQ(rows[5].activation, ActivationKind::Sigmoid);
  EXPECT_EQ(net.output_dim(), 5u);
}

TEST(Network, RequiresSigmoidHeadAndChainedShapes) {
  Rng rng(1);
  std::vector<std::unique_ptr<Layer>> no_head;
  no_head.push_back(std::make_unique<Dense>(3, 2, rng));
  EXPECT_EQ(error_of([&] { Network(Shape{{3}}, std::move(no_head)); }), ErrorCode::InvalidConfig);

  std::vector<std::unique_ptr<Layer>> broken;
  broken.push_back(std::make_unique<Dense>(3, 2, rng));
  broken.push_back(std::make_unique<Dense>(4, 5, rng));
  broken.push_back(std::make_unique<Activation>(ActivationKind::Sigmoid));
  EXPECT_EQ(error_of([&] { Network(Shape{{3}}, std::move(broken)); }), ErrorCode::ShapeMismatch);

  EXPECT_EQ(error_of([] { Network(Shape{{3}}, {}); }), ErrorCode::InvalidConfig);
}

TEST(Network, StaleCacheAfterUpdate) {
  auto net = build_tfanet(ModelConfig::tfanet(4));
  Rng rng(2);
  const auto x = Tensor2::row_vector({1, 0, 0.5, 0});
  const Tensor2 g(1, 5, 0.1);
  EXPECT_EQ(error_of([&] { net.backward(g); }), ErrorCode::StaleCache);
  net.forward_logits(x, Mode::Train, rng);
  net.mark_updated();
  EXPECT_EQ(error_of([&] { net.backward(g); }), ErrorCode::StaleCache);
  net.forward_logits(x, Mode::Train, rng);
  net.backward(g);
  EXPECT_EQ(error_of([&] { net.backward(g); }), ErrorCode::StaleCache);
}

TEST(Network, PredictIsSigmoidOfLogitsAndConst) {
  const auto net = build_ecnet(ModelConfig::ecnet(9, 4));
  const auto x = Tensor2::row_vector({1, 9, 0, 3});
  const auto logits = net.infer_logits(x);
  const auto probs = net.predict(x);
  ASSERT_EQ(probs.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_DOUBLE_EQ(probs[i], sigmoid(logits[i]));
    EXPECT_GT(probs[i], 0.0);
    EXPECT_LT(probs[i], 1.0);
  }
  EXPECT_EQ(net.predict(x), probs);
}

TEST(Network, InferenceIgnoresDropout) {
  auto net = build_tfanet(ModelConfig::tfanet(6));
  Rng rng(3);
  const auto x = Tensor2::row_vector({0.2, 0.1, 0, 0.9, 0.3, 0.3});
  EXPECT_EQ(net.forward_logits(x, Mode::Infer, rng), net.infer_logits(x));
}

TEST(Network, ParameterCountSumsLayers) {
  const auto net = build_tfanet(ModelConfig::tfanet(34684));
  std::size_t sum = 0;
  for (const auto& row : net.summary()) sum += row.parameters;
  EXPECT_EQ(sum, net.parameter_count());
  EXPECT_EQ(net.parameter_count(), 2219840u + 2080u + 165u);
}
