#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "genreflow/nn/layers.hpp"

namespace genreflow::nn {

/// One row of a Keras-style summary: activation layers are folded into the
/// layer they follow.
struct LayerSummary {
  std::string name;
  std::string type;
  std::string description;
  Shape input;
  Shape output;
  std::size_t parameters = 0;
  std::optional<ActivationKind> activation;
};

/// Fixed layer sequence ending in a sigmoid activation. Training runs the
/// body up to the logits and pairs the final sigmoid with the loss.
class Network {
 public:
  /// Validates shape chaining. Errors: InvalidConfig, ShapeMismatch.
  Network(Shape input_shape, std::vector<std::unique_ptr<Layer>> layers);

  Network(Network&&) noexcept = default;
  Network& operator=(Network&&) noexcept = default;

  const Shape& input_shape() const noexcept { return input_shape_; }
  std::size_t output_dim() const;
  std::size_t layer_count() const noexcept { return layers_.size(); }
  Layer& layer(std::size_t i) { return *layers_.at(i); }
  const Layer& layer(std::size_t i) const { return *layers_.at(i); }

  std::vector<LayerSummary> summary() const;
  std::size_t parameter_count() const noexcept;
  std::vector<Parameter*> parameters();
  std::vector<const Parameter*> parameters() const;

  /// Sigmoid probabilities without touching any cache.
  Tensor2 predict(const Tensor2& input) const;
  Tensor2 infer_logits(const Tensor2& input) const;

  /// Training-path forward up to the logits; caches for backward().
  Tensor2 forward_logits(const Tensor2& input, Mode mode, Rng& rng);
  /// Accumulates parameter gradients from dL/dlogits. Errors: StaleCache
  /// (no forward since the last backward or parameter update).
  void backward(const Tensor2& grad_logits);

  void zero_grad() noexcept;
  /// Call after parameters change; invalidates any pending forward cache.
  void mark_updated() noexcept { ++version_; }

 private:
  std::size_t body_size() const noexcept { return layers_.size() - 1; }

  Shape input_shape_;
  std::vector<std::unique_ptr<Layer>> layers_;
  std::uint64_t version_ = 0;
  std::optional<std::uint64_t> cached_version_;
};

}  // namespace genreflow::nn
