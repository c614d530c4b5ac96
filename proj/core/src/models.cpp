#include "genreflow/models.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <nlohmann/json.hpp>
#include <numeric>

#include "genreflow/error.hpp"
#include "genreflow/nn/adam.hpp"
#include "genreflow/nn/loss.hpp"

namespace genreflow {
namespace {

using nlohmann::json;
using nn::Tensor2;

nn::Rng seeded(std::uint64_t seed, std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), stream};
  return nn::Rng(seq);
}

template <typename L, typename... Args>
void add(std::vector<std::unique_ptr<nn::Layer>>& layers, std::string name, Args&&... args) {
  auto layer = std::make_unique<L>(std::forward<Args>(args)...);
  layer->set_name(std::move(name));
  layers.push_back(std::move(layer));
}

nn::ActivationKind hidden_activation(const ModelConfig& c) {
  auto a = nn::parse_activation(c.hidden_activation);
  if (!a) throw Error(ErrorCode::InvalidConfig, "unknown hidden activation '" + c.hidden_activation + "'");
  return *a;
}

bool exact_match(std::span<const double> probs, const LabelVector& truth, double threshold) {
  for (std::size_t g = 0; g < kGenreCount; ++g) {
    if ((probs[g] >= threshold) != truth[g]) return false;
  }
  return true;
}

void require_input_shape(const nn::Network& net, const Sample& s) {
  const auto expected = net.input_shape().elements();
  if (s.input.rows() != 1 || s.input.cols() != expected) {
    throw Error(ErrorCode::ShapeMismatch, "sample '" + s.id + "' has input " + std::to_string(s.input.rows()) + "x" +
                                              std::to_string(s.input.cols()) + ", network expects 1x" +
                                              std::to_string(expected));
  }
}

}  // namespace

std::string_view model_kind_name(ModelKind kind) noexcept { return kind == ModelKind::ECnet ? "ecnet" : "tfanet"; }

std::optional<ModelKind> parse_model_kind(std::string_view name) noexcept {
  std::string lower(name);
  for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower == "ecnet") return ModelKind::ECnet;
  if (lower == "tfanet") return ModelKind::TFAnet;
  return std::nullopt;
}

ModelConfig ModelConfig::ecnet(std::size_t vocab_size, std::size_t max_len) {
  ModelConfig c;
  c.kind = ModelKind::ECnet;
  c.vocab_size = vocab_size;
  c.max_len = max_len;
  c.hidden_units = {32};
  return c;
}

ModelConfig ModelConfig::tfanet(std::size_t feature_dim) {
  ModelConfig c;
  c.kind = ModelKind::TFAnet;
  c.feature_dim = feature_dim;
  c.hidden_units = {64, 32};
  c.dropout_rates = {0.4, 0.2};
  return c;
}

void ModelConfig::validate() const {
  auto fail = [](const std::string& why) { throw Error(ErrorCode::InvalidConfig, why); };
  if (output_dim != kGenreCount) fail("output_dim must be " + std::to_string(kGenreCount));
  if (epochs == 0) fail("epochs must be >= 1");
  if (batch_size == 0) fail("batch_size must be >= 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) fail("learning_rate must be positive");
  if (std::any_of(hidden_units.begin(), hidden_units.end(), [](auto u) { return u == 0; })) {
    fail("hidden units must be positive");
  }
  if (!nn::parse_activation(hidden_activation)) fail("unknown hidden activation '" + hidden_activation + "'");
  if (kind == ModelKind::ECnet) {
    if (vocab_size < 1) fail("ECnet needs vocab_size >= 1");
    if (pool < 1) fail("pool must be >= 1");
    if (max_len < 2 || max_len < pool) fail("ECnet needs max_len >= 2 and >= pool");
    if (embedding_dim == 0 || conv_filters == 0) fail("embedding_dim and conv_filters must be positive");
    if (kernel_width == 0 || kernel_width % 2 == 0) fail("kernel_width must be odd");
  } else {
    if (feature_dim < 1) fail("TFAnet needs feature_dim >= 1");
    if (dropout_rates.size() != hidden_units.size()) fail("TFAnet needs one dropout rate per hidden layer");
    for (double r : dropout_rates) {
      if (!(r >= 0.0 && r < 1.0)) fail("dropout rates must lie in [0,1)");
    }
  }
}

std::string ModelConfig::to_json() const {
  json j = {{"kind", model_kind_name(kind)},
            {"vocab_size", vocab_size},
            {"max_len", max_len},
            {"feature_dim", feature_dim},
            {"embedding_dim", embedding_dim},
            {"conv_filters", conv_filters},
            {"kernel_width", kernel_width},
            {"pool", pool},
            {"hidden_units", hidden_units},
            {"dropout_rates", dropout_rates},
            {"output_dim", output_dim},
            {"hidden_activation", hidden_activation},
            {"learning_rate", learning_rate},
            {"epochs", epochs},
            {"batch_size", batch_size},
            {"seed", seed}};
  return j.dump();
}

ModelConfig ModelConfig::from_json(std::string_view text) {
  try {
    json j = json::parse(text);
    ModelConfig c;
    auto kind = parse_model_kind(j.at("kind").get<std::string>());
    if (!kind) throw Error(ErrorCode::InvalidConfig, "unknown model kind");
    c.kind = *kind;
    j.at("vocab_size").get_to(c.vocab_size);
    j.at("max_len").get_to(c.max_len);
    j.at("feature_dim").get_to(c.feature_dim);
    j.at("embedding_dim").get_to(c.embedding_dim);
    j.at("conv_filters").get_to(c.conv_filters);
    j.at("kernel_width").get_to(c.kernel_width);
    j.at("pool").get_to(c.pool);
    j.at("hidden_units").get_to(c.hidden_units);
    j.at("dropout_rates").get_to(c.dropout_rates);
    j.at("output_dim").get_to(c.output_dim);
    j.at("hidden_activation").get_to(c.hidden_activation);
    j.at("learning_rate").get_to(c.learning_rate);
    j.at("epochs").get_to(c.epochs);
    j.at("batch_size").get_to(c.batch_size);
    j.at("seed").get_to(c.seed);
    return c;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("model config: ") + e.what());
  }
}

nn::Network build_ecnet(std::size_t vocab_size, std::size_t max_len) {
  return build_ecnet(ModelConfig::ecnet(vocab_size, max_len));
}

nn::Network build_ecnet(const ModelConfig& config) {
  config.validate();
  if (config.kind != ModelKind::ECnet) throw Error(ErrorCode::InvalidConfig, "config is not an ECnet config");
  auto rng = seeded(config.seed, 1);
  const auto act = hidden_activation(config);
  std::vector<std::unique_ptr<nn::Layer>> layers;
  add<nn::Embedding>(layers, "embedding", config.vocab_size, config.embedding_dim, config.max_len, rng);
  add<nn::Conv1dSame>(layers, "conv1d", config.embedding_dim, config.conv_filters, config.kernel_width, rng);
  add<nn::Activation>(layers, "conv1d_activation", act);
  add<nn::MaxPool1d>(layers, "max_pooling1d", config.pool);
  add<nn::Flatten>(layers, "flatten");
  std::size_t width = (config.max_len / config.pool) * config.conv_filters;
  std::size_t n = 1;
  for (auto units : config.hidden_units) {
    const auto name = "dense_" + std::to_string(n++);
    add<nn::Dense>(layers, name, width, units, rng);
    add<nn::Activation>(layers, name + "_activation", act);
    width = units;
  }
  const auto name = "dense_" + std::to_string(n);
  add<nn::Dense>(layers, name, width, config.output_dim, rng);
  add<nn::Activation>(layers, name + "_activation", nn::ActivationKind::Sigmoid);
  return nn::Network(nn::Shape{{config.max_len}}, std::move(layers));
}

nn::Network build_tfanet(std::size_t feature_dim) { return build_tfanet(ModelConfig::tfanet(feature_dim)); }

nn::Network build_tfanet(const ModelConfig& config) {
  config.validate();
  if (config.kind != ModelKind::TFAnet) throw Error(ErrorCode::InvalidConfig, "config is not a TFAnet config");
  auto rng = seeded(config.seed, 1);
  const auto act = hidden_activation(config);
  std::vector<std::unique_ptr<nn::Layer>> layers;
  std::size_t width = config.feature_dim;
  for (std::size_t i = 0; i < config.hidden_units.size(); ++i) {
    const auto n = std::to_string(i + 1);
    add<nn::Dense>(layers, "dense_" + n, width, config.hidden_units[i], rng);
    add<nn::Activation>(layers, "dense_" + n + "_activation", act);
    add<nn::Dropout>(layers, "dropout_" + n, config.dropout_rates[i]);
    width = config.hidden_units[i];
  }
  const auto name = "dense_" + std::to_string(config.hidden_units.size() + 1);
  add<nn::Dense>(layers, name, width, config.output_dim, rng);
  add<nn::Activation>(layers, name + "_activation", nn::ActivationKind::Sigmoid);
  return nn::Network(nn::Shape{{config.feature_dim}}, std::move(layers));
}

nn::Network build_network(const ModelConfig& config) {
  return config.kind == ModelKind::ECnet ? build_ecnet(config) : build_tfanet(config);
}

Tensor2 to_input(const EncodedSequence& sequence) {
  std::vector<double> v(sequence.indices.begin(), sequence.indices.end());
  return Tensor2::row_vector(std::move(v));
}

Tensor2 to_input(const SparseVector& features) { return Tensor2::row_vector(features.to_dense()); }

double evaluate_loss(const nn::Network& network, std::span<const Sample> samples) {
  if (samples.empty()) throw Error(ErrorCode::EmptyInput, "no samples to evaluate");
  double sum = 0.0;
  for (const auto& s : samples) {
    auto probs = network.predict(s.input);
    sum += nn::bce_multilabel(probs.values(), s.labels).loss;
  }
  return sum / static_cast<double>(samples.size());
}

double subset_accuracy(const nn::Network& network, std::span<const Sample> samples, double threshold) {
  if (samples.empty()) throw Error(ErrorCode::EmptyInput, "no samples to evaluate");
  std::size_t hits = 0;
  for (const auto& s : samples) {
    if (exact_match(network.predict(s.input).values(), s.labels, threshold)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(samples.size());
}

TrainedModel train(nn::Network network, std::span<const Sample> train_set, std::span<const Sample> eval_set,
                   const ModelConfig& config, std::string feature_hash, const EpochCallback& on_epoch) {
  config.validate();
  if (train_set.empty()) throw Error(ErrorCode::EmptyInput, "training set is empty");
  for (const auto& s : train_set) require_input_shape(network, s);
  for (const auto& s : eval_set) require_input_shape(network, s);

  nn::AdamState adam(nn::AdamOptions{config.learning_rate});
  auto shuffle_rng = seeded(config.seed, 2);
  auto dropout_rng = seeded(config.seed, 3);
  auto params = network.parameters();

  std::vector<std::size_t> order(train_set.size());
  std::vector<EpochRecord> history;
  const auto n = static_cast<double>(train_set.size());

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double loss_sum = 0.0;
    std::size_t hits = 0;

    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      const double scale = 1.0 / static_cast<double>(end - start);
      network.zero_grad();
      for (std::size_t k = start; k < end; ++k) {
        const Sample& s = train_set[order[k]];
        try {
          Tensor2 logits = network.forward_logits(s.input, nn::Mode::Train, dropout_rng);
          Tensor2 probs = nn::activation_forward(logits, nn::ActivationKind::Sigmoid);
          auto loss = nn::bce_multilabel(probs.values(), s.labels);
          if (!std::isfinite(loss.loss)) throw Error(ErrorCode::NonFinite, "loss is not finite");
          loss_sum += loss.loss;
          if (exact_match(probs.values(), s.labels, 0.5)) ++hits;
          for (auto& g : loss.grad_logits) g *= scale;
          network.backward(Tensor2::row_vector(std::move(loss.grad_logits)));
        } catch (const Error& e) {
          if (e.code() != ErrorCode::NonFinite) throw;
          throw Error(ErrorCode::NonFiniteLoss, "epoch " + std::to_string(epoch) + ", sample '" + s.id +
                                                    "', step " + std::to_string(adam.step() + 1) + ": " + e.what());
        }
      }
      nn::adam_update(params, adam);
      network.mark_updated();
      for (const auto* p : params) {
        if (!p->value.all_finite()) {
          throw Error(ErrorCode::NonFiniteLoss, "epoch " + std::to_string(epoch) + ": parameter '" + p->name +
                                                    "' became non-finite after step " + std::to_string(adam.step()));
        }
      }
    }

    EpochRecord rec{epoch, loss_sum / n, static_cast<double>(hits) / n, std::nullopt};
    if (!eval_set.empty()) rec.eval_loss = evaluate_loss(network, eval_set);
    history.push_back(rec);
    if (on_epoch) on_epoch(rec);
  }

  return TrainedModel{config, std::move(network), std::move(feature_hash), std::move(history)};
}

std::array<double, kGenreCount> predict(const TrainedModel& model, const Tensor2& input, std::string_view input_hash) {
  if (input_hash != model.feature_hash) {
    throw Error(ErrorCode::HashMismatch, "input encoded with features " + std::string(input_hash.substr(0, 12)) +
                                             "..., checkpoint expects " + model.feature_hash.substr(0, 12) + "...");
  }
  auto probs = model.network.predict(input);
  std::array<double, kGenreCount> out{};
  std::copy_n(probs.values().begin(), kGenreCount, out.begin());
  return out;
}

}  // namespace genreflow
