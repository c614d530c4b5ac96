#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "genreflow/nn/layers.hpp"

namespace genreflow::nn {

struct AdamOptions {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Bias-corrected Adam moments, one pair per parameter tensor. Moments are
/// allocated on the first update.
class AdamState {
 public:
  AdamState() = default;
  explicit AdamState(AdamOptions options) : options_(options) {}

  const AdamOptions& options() const noexcept { return options_; }
  std::uint64_t step() const noexcept { return step_; }
  std::size_t size() const noexcept { return first_.size(); }
  const Tensor2& first_moment(std::size_t i) const { return first_.at(i); }
  const Tensor2& second_moment(std::size_t i) const { return second_.at(i); }

 private:
  friend void adam_update(std::span<Parameter* const> params, AdamState& state);

  AdamOptions options_;
  std::uint64_t step_ = 0;
  std::vector<Tensor2> first_;
  std::vector<Tensor2> second_;
};

/// One Adam step using each parameter's accumulated gradient.
/// Errors: ShapeMismatch (parameter set differs from the state's).
void adam_update(std::span<Parameter* const> params, AdamState& state);

}  // namespace genreflow::nn
