#pragma once

#include <span>
#include <vector>

#include "genreflow/genre.hpp"

namespace genreflow::nn {

inline constexpr double kProbabilityClamp = 1e-7;

struct LossResult {
  double loss = 0.0;
  std::vector<double> grad_logits;  // (p - t) / n, w.r.t. pre-sigmoid logits
};

/// Mean binary cross-entropy over labels; probabilities are clamped to
/// [1e-7, 1 - 1e-7] inside the logarithms. Errors: ShapeMismatch.
LossResult bce_multilabel(std::span<const double> probs, std::span<const double> targets);
LossResult bce_multilabel(std::span<const double> probs, const LabelVector& targets);

}  // namespace genreflow::nn
