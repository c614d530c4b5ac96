#include "genreflow/nn/loss.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "genreflow/error.hpp"

namespace genreflow::nn {

LossResult bce_multilabel(std::span<const double> probs, std::span<const double> targets) {
  if (probs.size() != targets.size() || probs.empty()) {
    throw Error(ErrorCode::ShapeMismatch, "loss needs equally sized, nonempty probability and target vectors");
  }
  const auto n = static_cast<double>(probs.size());
  LossResult r;
  r.grad_logits.resize(probs.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double p = std::clamp(probs[i], kProbabilityClamp, 1.0 - kProbabilityClamp);
    const double t = targets[i];
    sum += -(t * std::log(p) + (1.0 - t) * std::log(1.0 - p));
    r.grad_logits[i] = (probs[i] - t) / n;
  }
  r.loss = sum / n;
  return r;
}

LossResult bce_multilabel(std::span<const double> probs, const LabelVector& targets) {
  std::array<double, kGenreCount> t{};
  for (std::size_t i = 0; i < kGenreCount; ++i) t[i] = targets[i] ? 1.0 : 0.0;
  return bce_multilabel(probs, t);
}

}  // namespace genreflow::nn
