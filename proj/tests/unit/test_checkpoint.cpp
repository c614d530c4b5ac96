#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "genreflow/checkpoint.hpp"
#include "genreflow/error.hpp"
#include "support/synthetic.hpp"
#include "support/test_support.hpp"

using namespace genreflow;

namespace {

ErrorCode load_error(const std::string& bytes) {
  std::istringstream in(bytes);
  try {
    load_checkpoint(in);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "checkpoint loaded";
  return ErrorCode::InvalidArgument;
}

TrainedModel trained_ecnet() {
  const auto corpus = test_support::keyword_corpus(8);
  auto cfg = test_support::keyword_config(corpus);
  cfg.epochs = 3;
  return train(build_ecnet(cfg), corpus.samples, corpus.samples, cfg, corpus.vocab.hash());
}

std::string bytes_of(const TrainedModel& m) {
  std::ostringstream out;
  save_checkpoint(m, out);
  return out.str();
}

}  // namespace

TEST(Checkpoint, RoundTripPreservesPredictions) {
  const auto model = trained_ecnet();
  std::istringstream in(bytes_of(model));
  const auto loaded = load_checkpoint(in);
  EXPECT_EQ(loaded.config.to_json(), model.config.to_json());
  EXPECT_EQ(loaded.feature_hash, model.feature_hash);
  ASSERT_EQ(loaded.history.size(), model.history.size());
  EXPECT_EQ(loaded.history.back().train_loss, model.history.back().train_loss);
  EXPECT_EQ(loaded.history.back().eval_loss, model.history.back().eval_loss);

  const auto corpus = test_support::keyword_corpus(8);
  for (const auto& s : corpus.samples) {
    const auto a = predict(model, s.input, model.feature_hash);
    const auto b = predict(loaded, s.input, model.feature_hash);
    for (std::size_t g = 0; g < kGenreCount; ++g) EXPECT_NEAR(a[g], b[g], 1e-6);
  }
  const auto pa = model.network.parameters(), pb = loaded.network.parameters();
  ASSERT_EQ(pa.size(), pb.size());
  for (std::size_t i = 0; i < pa.size(); ++i) {
    for (std::size_t j = 0; j < pa[i]->value.size(); ++j) {
      EXPECT_EQ(pb[i]->value[j], static_cast<double>(static_cast<float>(pa[i]->value[j])));
    }
  }
}

TEST(Checkpoint, TfanetRoundTripThroughFile) {
  auto cfg = ModelConfig::tfanet(7);
  cfg.epochs = 1;
  std::vector<Sample> samples = {{"a", nn::Tensor2(1, 7, 0.3), LabelVector::from_bits("10100")}};
  const auto model = train(build_tfanet(cfg), samples, {}, cfg, "feat");
  test_support::TempDir dir;
  save_checkpoint(model, dir / "m.ckpt");
  const auto loaded = load_checkpoint(dir / "m.ckpt");
  EXPECT_EQ(loaded.config.kind, ModelKind::TFAnet);
  EXPECT_EQ(loaded.config.dropout_rates, cfg.dropout_rates);
  EXPECT_EQ(bytes_of(loaded), bytes_of(model));
}

TEST(Checkpoint, SerializationIsDeterministic) {
  const auto a = trained_ecnet();
  const auto b = trained_ecnet();
  EXPECT_EQ(bytes_of(a), bytes_of(b));
  std::istringstream in(bytes_of(a));
  EXPECT_EQ(bytes_of(load_checkpoint(in)), bytes_of(a));
}

TEST(Checkpoint, LayoutHeader) {
  const auto bytes = bytes_of(trained_ecnet());
  ASSERT_GT(bytes.size(), 14u);
  EXPECT_EQ(bytes.substr(0, 8), "GFLOWCKP");
  EXPECT_EQ(static_cast<unsigned char>(bytes[8]), kCheckpointVersion);
  EXPECT_EQ(static_cast<unsigned char>(bytes[9]), 0);
  EXPECT_NE(bytes.find("conv1d/kernel"), std::string::npos);
}

TEST(Checkpoint, TruncationIsCorrupt) {
  const auto bytes = bytes_of(trained_ecnet());
  for (std::size_t cut : {std::size_t{0}, std::size_t{5}, std::size_t{9}, std::size_t{13}, bytes.size() / 2,
                          bytes.size() - 1}) {
    EXPECT_EQ(load_error(bytes.substr(0, cut)), ErrorCode::CorruptCheckpoint) << cut;
  }
  EXPECT_EQ(load_error(bytes + "x"), ErrorCode::CorruptCheckpoint);
}

TEST(Checkpoint, BadMagicAndVersions) {
  auto bytes = bytes_of(trained_ecnet());
  auto magic = bytes;
  magic[0] = 'X';
  EXPECT_EQ(load_error(magic), ErrorCode::CorruptCheckpoint);
  auto future = bytes;
  future[8] = static_cast<char>(kCheckpointVersion + 1);
  EXPECT_EQ(load_error(future), ErrorCode::VersionMismatch);
  auto zero = bytes;
  zero[8] = 0;
  EXPECT_EQ(load_error(zero), ErrorCode::CorruptCheckpoint);
}

TEST(Checkpoint, MissingFileIsIoError) {
  test_support::TempDir dir;
  try {
    load_checkpoint(dir / "absent.ckpt");
    FAIL() << "expected IoError";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IoError);
  }
}
