#include "genreflow/nn/adam.hpp"

#include <cmath>

#include "genreflow/error.hpp"

namespace genreflow::nn {

void adam_update(std::span<Parameter* const> params, AdamState& state) {
  if (state.first_.empty()) {
    for (const auto* p : params) {
      state.first_.emplace_back(p->value.rows(), p->value.cols());
      state.second_.emplace_back(p->value.rows(), p->value.cols());
    }
  }
  if (state.first_.size() != params.size()) {
    throw Error(ErrorCode::ShapeMismatch, "Adam state tracks " + std::to_string(state.first_.size()) +
                                              " tensors, got " + std::to_string(params.size()));
  }
  for (std::size_t k = 0; k < params.size(); ++k) {
    const auto& p = *params[k];
    if (!p.value.same_shape(state.first_[k]) || !p.grad.same_shape(p.value)) {
      throw Error(ErrorCode::ShapeMismatch, "Adam shape mismatch on '" + p.name + "'");
    }
  }

  const auto& o = state.options_;
  ++state.step_;
  const double t = static_cast<double>(state.step_);
  const double correction1 = 1.0 - std::pow(o.beta1, t);
  const double correction2 = 1.0 - std::pow(o.beta2, t);

  for (std::size_t k = 0; k < params.size(); ++k) {
    auto value = params[k]->value.values();
    auto grad = params[k]->grad.values();
    auto m = state.first_[k].values();
    auto v = state.second_[k].values();
    for (std::size_t i = 0; i < value.size(); ++i) {
      const double g = grad[i];
      m[i] = o.beta1 * m[i] + (1.0 - o.beta1) * g;
      v[i] = o.beta2 * v[i] + (1.0 - o.beta2) * g * g;
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      value[i] -= o.learning_rate * m_hat / (std::sqrt(v_hat) + o.epsilon);
    }
  }
}

}  // namespace genreflow::nn
