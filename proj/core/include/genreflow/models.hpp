#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "genreflow/genre.hpp"
#include "genreflow/nn/network.hpp"
#include "genreflow/textprep.hpp"
#include "genreflow/tfidf.hpp"

namespace genreflow {

enum class ModelKind { ECnet, TFAnet };

std::string_view model_kind_name(ModelKind kind) noexcept;
/// "ecnet" / "tfanet", case-insensitive.
std::optional<ModelKind> parse_model_kind(std::string_view name) noexcept;

struct ModelConfig {
  ModelKind kind = ModelKind::ECnet;
  std::size_t vocab_size = 0;   // ECnet
  std::size_t max_len = 0;      // ECnet
  std::size_t feature_dim = 0;  // TFAnet
  std::size_t embedding_dim = 64;
  std::size_t conv_filters = 64;
  std::size_t kernel_width = 3;
  std::size_t pool = 2;
  std::vector<std::size_t> hidden_units;  // ECnet {32}; TFAnet {64, 32}
  std::vector<double> dropout_rates;      // TFAnet {0.4, 0.2}
  std::size_t output_dim = kGenreCount;
  std::string hidden_activation = "relu";
  double learning_rate = 0.001;
  std::size_t epochs = 50;
  std::size_t batch_size = 32;
  std::uint64_t seed = 1;

  static ModelConfig ecnet(std::size_t vocab_size, std::size_t max_len);
  static ModelConfig tfanet(std::size_t feature_dim);

  /// Errors: InvalidConfig.
  void validate() const;

  std::string to_json() const;
  static ModelConfig from_json(std::string_view json);
};

/// embedding(V,64) -> conv1d_same(64, k=3) -> relu -> maxpool(2) -> flatten
/// -> dense(32) -> relu -> dense(5) -> sigmoid.
nn::Network build_ecnet(std::size_t vocab_size, std::size_t max_len);
nn::Network build_ecnet(const ModelConfig& config);

/// dense(64) -> relu -> dropout(0.4) -> dense(32) -> relu -> dropout(0.2)
/// -> dense(5) -> sigmoid.
nn::Network build_tfanet(std::size_t feature_dim);
nn::Network build_tfanet(const ModelConfig& config);

nn::Network build_network(const ModelConfig& config);

/// Network inputs: a 1 x L row of token indices for ECnet, a dense 1 x M
/// TF-IDF row for TFAnet.
nn::Tensor2 to_input(const EncodedSequence& sequence);
nn::Tensor2 to_input(const SparseVector& features);

struct Sample {
  std::string id;
  nn::Tensor2 input;
  LabelVector labels;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double train_subset_accuracy = 0.0;
  std::optional<double> eval_loss;
};

struct TrainedModel {
  ModelConfig config;
  nn::Network network;
  std::string feature_hash;  // hash of the vocabulary or TF-IDF model
  std::vector<EpochRecord> history;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Mini-batch BCE + Adam for config.epochs epochs; batches are drawn from a
/// per-epoch shuffle seeded by config.seed. Errors: EmptyInput,
/// ShapeMismatch, NonFiniteLoss.
TrainedModel train(nn::Network network, std::span<const Sample> train_set, std::span<const Sample> eval_set,
                   const ModelConfig& config, std::string feature_hash, const EpochCallback& on_epoch = {});

/// Mean BCE in inference mode.
double evaluate_loss(const nn::Network& network, std::span<const Sample> samples);
/// Fraction of samples whose thresholded label vector matches exactly.
double subset_accuracy(const nn::Network& network, std::span<const Sample> samples, double threshold = 0.5);

/// Sigmoid outputs for one input. Errors: HashMismatch when the input was
/// encoded with a different vocabulary/feature model.
std::array<double, kGenreCount> predict(const TrainedModel& model, const nn::Tensor2& input,
                                        std::string_view input_hash);

}  // namespace genreflow
