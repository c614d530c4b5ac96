#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "genreflow/nn/tensor.hpp"

namespace genreflow::nn {

enum class LayerKind { Embedding, Conv1dSame, MaxPool1d, Flatten, Dense, Dropout, Activation };
enum class ActivationKind { Relu, Sigmoid };
enum class Mode { Train, Infer };

std::string_view layer_kind_name(LayerKind kind) noexcept;
std::string_view activation_name(ActivationKind kind) noexcept;
std::optional<ActivationKind> parse_activation(std::string_view name) noexcept;

double sigmoid(double x) noexcept;
double relu(double x) noexcept;

// Stateless kernels. The layer classes below wrap them with caches and
// gradients.

/// Row i of the result is table row indices[i] - 1; index 0 is the padding
/// row and yields zeros. Errors: IndexOutOfRange.
Tensor2 embedding_forward(std::span<const std::uint32_t> indices, const Tensor2& table);

/// Zero-padded cross-correlation keeping the input length. `kernels` is
/// F x (k*C) with column j*C + c holding tap j of channel c. Errors:
/// ShapeMismatch, InvalidArgument (even kernel width).
Tensor2 conv1d_same_forward(const Tensor2& input, const Tensor2& kernels, const Tensor2& bias,
                            std::size_t kernel_width);

struct PoolResult {
  Tensor2 output;
  std::vector<std::size_t> argmax;  // flat input offset per output element
};

/// Non-overlapping windows; a trailing partial window is dropped. Ties pick
/// the first maximum.
PoolResult maxpool1d_forward(const Tensor2& input, std::size_t pool);

/// W x + b for a 1 x n input. Errors: ShapeMismatch.
Tensor2 dense_forward(const Tensor2& input, const Tensor2& weights, const Tensor2& bias);

/// Inverted dropout. Infer mode (or rate 0) is the identity. The mask (0 or
/// 1/(1-rate) per element) is written to `mask` when given.
Tensor2 dropout_apply(const Tensor2& input, double rate, Mode mode, Rng& rng, std::vector<double>* mask = nullptr);

Tensor2 activation_forward(const Tensor2& input, ActivationKind kind);

struct Parameter {
  std::string name;
  Tensor2 value;
  Tensor2 grad;
};

class Layer {
 public:
  virtual ~Layer() = default;

  virtual LayerKind kind() const noexcept = 0;
  virtual std::string description() const = 0;
  /// Errors: ShapeMismatch.
  virtual Shape output_shape(const Shape& input) const = 0;

  /// Stateless evaluation (dropout disabled); safe to call concurrently.
  virtual Tensor2 infer(const Tensor2& input) const = 0;
  /// Evaluation that records what backward needs.
  virtual Tensor2 forward(const Tensor2& input, Mode mode, Rng& rng) = 0;
  /// Adds parameter gradients and returns dL/dinput (empty when
  /// `need_input_grad` is false). Consumes the cache. Errors: StaleCache.
  virtual Tensor2 backward(const Tensor2& grad_output, bool need_input_grad = true) = 0;

  virtual std::span<Parameter> parameters() noexcept { return {}; }
  std::span<const Parameter> parameters() const noexcept { return const_cast<Layer*>(this)->parameters(); }
  std::size_t parameter_count() const noexcept;

  const std::string& name() const noexcept { return name_; }
  void set_name(std::string name) { name_ = std::move(name); }

 protected:
  void require_cache(bool present) const;

 private:
  std::string name_;
};

/// Trainable rows 1..V; row 0 is an implicit, frozen zero row for padding.
class Embedding final : public Layer {
 public:
  Embedding(std::size_t vocab_size, std::size_t dim, std::size_t input_length, Rng& rng);

  LayerKind kind() const noexcept override { return LayerKind::Embedding; }
  std::string description() const override;
  Shape output_shape(const Shape& input) const override;
  Tensor2 infer(const Tensor2& input) const override;
  Tensor2 forward(const Tensor2& input, Mode mode, Rng& rng) override;
  Tensor2 backward(const Tensor2& grad_output, bool need_input_grad = true) override;
  std::span<Parameter> parameters() noexcept override { return {&table_, 1}; }

 private:
  std::vector<std::uint32_t> to_indices(const Tensor2& input) const;

  std::size_t input_length_;
  Parameter table_;
  std::optional<std::vector<std::uint32_t>> cache_;
};

class Conv1dSame final : public Layer {
 public:
  Conv1dSame(std::size_t in_channels, std::size_t filters, std::size_t kernel_width, Rng& rng);

  LayerKind kind() const noexcept override { return LayerKind::Conv1dSame; }
  std::string description() const override;
  Shape output_shape(const Shape& input) const override;
  Tensor2 infer(const Tensor2& input) const override;
  Tensor2 forward(const Tensor2& input, Mode mode, Rng& rng) override;
  Tensor2 backward(const Tensor2& grad_output, bool need_input_grad = true) override;
  std::span<Parameter> parameters() noexcept override { return params_; }

  std::size_t kernel_width() const noexcept { return kernel_width_; }

 private:
  std::size_t in_channels_;
  std::size_t filters_;
  std::size_t kernel_width_;
  std::vector<Parameter> params_;  // kernel, bias
  std::optional<Tensor2> cache_;
};

class MaxPool1d final : public Layer {
 public:
  explicit MaxPool1d(std::size_t pool);

  LayerKind kind() const noexcept override { return LayerKind::MaxPool1d; }
  std::string description() const override;
  Shape output_shape(const Shape& input) const override;
  Tensor2 infer(const Tensor2& input) const override;
  Tensor2 forward(const Tensor2& input, Mode mode, Rng& rng) override;
  Tensor2 backward(const Tensor2& grad_output, bool need_input_grad = true) override;

 private:
  std::size_t pool_;
  struct Cache {
    std::size_t in_rows, in_cols;
    std::vector<std::size_t> argmax;
  };
  std::optional<Cache> cache_;
};

class Flatten final : public Layer {
 public:
  LayerKind kind() const noexcept override { return LayerKind::Flatten; }
  std::string description() const override { return "Flatten Layer"; }
  Shape output_shape(const Shape& input) const override;
  Tensor2 infer(const Tensor2& input) const override;
  Tensor2 forward(const Tensor2& input, Mode mode, Rng& rng) override;
  Tensor2 backward(const Tensor2& grad_output, bool need_input_grad = true) override;

 private:
  std::optional<std::pair<std::size_t, std::size_t>> cache_;
};

class Dense final : public Layer {
 public:
  Dense(std::size_t inputs, std::size_t units, Rng& rng);

  LayerKind kind() const noexcept override { return LayerKind::Dense; }
  std::string description() const override;
  Shape output_shape(const Shape& input) const override;
  Tensor2 infer(const Tensor2& input) const override;
  Tensor2 forward(const Tensor2& input, Mode mode, Rng& rng) override;
  Tensor2 backward(const Tensor2& grad_output, bool need_input_grad = true) override;
  std::span<Parameter> parameters() noexcept override { return params_; }

 private:
  std::size_t inputs_;
  std::size_t units_;
  std::vector<Parameter> params_;  // kernel (units x inputs), bias
  std::optional<Tensor2> cache_;
};

class Dropout final : public Layer {
 public:
  explicit Dropout(double rate);

  LayerKind kind() const noexcept override { return LayerKind::Dropout; }
  std::string description() const override;
  Shape output_shape(const Shape& input) const override { return input; }
  Tensor2 infer(const Tensor2& input) const override { return input; }
  Tensor2 forward(const Tensor2& input, Mode mode, Rng& rng) override;
  Tensor2 backward(const Tensor2& grad_output, bool need_input_grad = true) override;

  double rate() const noexcept { return rate_; }

 private:
  double rate_;
  std::optional<std::vector<double>> mask_;
};

class Activation final : public Layer {
 public:
  explicit Activation(ActivationKind fn) : fn_(fn) {}

  LayerKind kind() const noexcept override { return LayerKind::Activation; }
  std::string description() const override;
  Shape output_shape(const Shape& input) const override { return input; }
  Tensor2 infer(const Tensor2& input) const override;
  Tensor2 forward(const Tensor2& input, Mode mode, Rng& rng) override;
  Tensor2 backward(const Tensor2& grad_output, bool need_input_grad = true) override;

  ActivationKind function() const noexcept { return fn_; }

 private:
  ActivationKind fn_;
  std::optional<Tensor2> cache_;  // activation output
};

}  // namespace genreflow::nn
