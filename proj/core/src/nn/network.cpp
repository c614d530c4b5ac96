#include "genreflow/nn/network.hpp"

#include "genreflow/error.hpp"

namespace genreflow::nn {

Network::Network(Shape input_shape, std::vector<std::unique_ptr<Layer>> layers)
    : input_shape_(std::move(input_shape)), layers_(std::move(layers)) {
  if (layers_.empty()) throw Error(ErrorCode::InvalidConfig, "network has no layers");
  auto* last = dynamic_cast<const Activation*>(layers_.back().get());
  if (!last || last->function() != ActivationKind::Sigmoid) {
    throw Error(ErrorCode::InvalidConfig, "network must end with a sigmoid activation");
  }
  Shape s = input_shape_;
  for (const auto& l : layers_) s = l->output_shape(s);
  if (s.dims.size() != 1) throw Error(ErrorCode::InvalidConfig, "network output must be a vector");
}

std::size_t Network::output_dim() const {
  Shape s = input_shape_;
  for (const auto& l : layers_) s = l->output_shape(s);
  return s.dims.front();
}

std::vector<LayerSummary> Network::summary() const {
  std::vector<LayerSummary> rows;
  Shape s = input_shape_;
  for (const auto& l : layers_) {
    Shape out = l->output_shape(s);
    if (l->kind() == LayerKind::Activation && !rows.empty()) {
      rows.back().activation = static_cast<const Activation&>(*l).function();
    } else {
      rows.push_back({l->name(), std::string(layer_kind_name(l->kind())), l->description(), s, out,
                      l->parameter_count(), std::nullopt});
    }
    s = std::move(out);
  }
  return rows;
}

std::size_t Network::parameter_count() const noexcept {
  std::size_t n = 0;
  for (const auto& l : layers_) n += l->parameter_count();
  return n;
}

std::vector<Parameter*> Network::parameters() {
  std::vector<Parameter*> out;
  for (auto& l : layers_) {
    for (auto& p : l->parameters()) out.push_back(&p);
  }
  return out;
}

std::vector<const Parameter*> Network::parameters() const {
  std::vector<const Parameter*> out;
  for (const auto& l : layers_) {
    for (const auto& p : std::as_const(*l).parameters()) out.push_back(&p);
  }
  return out;
}

Tensor2 Network::infer_logits(const Tensor2& input) const {
  Tensor2 x = input;
  for (std::size_t i = 0; i < body_size(); ++i) {
    x = layers_[i]->infer(x);
    require_finite(x, layers_[i]->name());
  }
  return x;
}

Tensor2 Network::predict(const Tensor2& input) const { return layers_.back()->infer(infer_logits(input)); }

Tensor2 Network::forward_logits(const Tensor2& input, Mode mode, Rng& rng) {
  Tensor2 x = input;
  for (std::size_t i = 0; i < body_size(); ++i) {
    x = layers_[i]->forward(x, mode, rng);
    require_finite(x, layers_[i]->name());
  }
  cached_version_ = version_;
  return x;
}

void Network::backward(const Tensor2& grad_logits) {
  if (!cached_version_ || *cached_version_ != version_) {
    throw Error(ErrorCode::StaleCache, "backward without a forward pass on the current parameters");
  }
  cached_version_.reset();
  Tensor2 g = grad_logits;
  for (std::size_t i = body_size(); i-- > 0;) {
    g = layers_[i]->backward(g, i > 0);
  }
}

void Network::zero_grad() noexcept {
  for (auto* p : parameters()) p->grad.fill(0.0);
}

}  // namespace genreflow::nn
