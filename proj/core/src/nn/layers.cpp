#include "genreflow/nn/layers.hpp"

#include <algorithm>
#include <cmath>

#include "genreflow/error.hpp"

namespace genreflow::nn {
namespace {

void glorot_uniform(Tensor2& t, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-limit, limit);
  for (double& v : t.values()) v = dist(rng);
}

Parameter make_param(std::string name, std::size_t rows, std::size_t cols) {
  return {std::move(name), Tensor2(rows, cols), Tensor2(rows, cols)};
}

std::string dims(std::size_t r, std::size_t c) { return std::to_string(r) + "x" + std::to_string(c); }

void require_vector(const Tensor2& t, std::size_t n, const char* what) {
  if (t.rows() != 1 || t.cols() != n) {
    throw Error(ErrorCode::ShapeMismatch, std::string(what) + ": expected 1x" + std::to_string(n) + ", got " +
                                              dims(t.rows(), t.cols()));
  }
}

void add_into(Tensor2& dst, const Tensor2& src) {
  auto d = dst.values();
  auto s = src.values();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] += s[i];
}

}  // namespace

std::string_view layer_kind_name(LayerKind kind) noexcept {
  switch (kind) {
    case LayerKind::Embedding: return "Embedding";
    case LayerKind::Conv1dSame: return "Conv1D";
    case LayerKind::MaxPool1d: return "MaxPooling1D";
    case LayerKind::Flatten: return "Flatten";
    case LayerKind::Dense: return "Dense";
    case LayerKind::Dropout: return "Dropout";
    case LayerKind::Activation: return "Activation";
  }
  return "Unknown";
}

std::string_view activation_name(ActivationKind kind) noexcept {
  return kind == ActivationKind::Relu ? "relu" : "sigmoid";
}

std::optional<ActivationKind> parse_activation(std::string_view name) noexcept {
  if (name == "relu") return ActivationKind::Relu;
  if (name == "sigmoid") return ActivationKind::Sigmoid;
  return std::nullopt;
}

double sigmoid(double x) noexcept {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double relu(double x) noexcept { return x > 0.0 ? x : 0.0; }

Tensor2 embedding_forward(std::span<const std::uint32_t> indices, const Tensor2& table) {
  Tensor2 out(indices.size(), table.cols());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const auto idx = indices[i];
    if (idx > table.rows()) {
      throw Error(ErrorCode::IndexOutOfRange, "token index " + std::to_string(idx) + " exceeds vocabulary size " +
                                                  std::to_string(table.rows()));
    }
    if (idx == 0) continue;
    auto src = table.row(idx - 1);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

Tensor2 conv1d_same_forward(const Tensor2& input, const Tensor2& kernels, const Tensor2& bias,
                            std::size_t kernel_width) {
  if (kernel_width == 0 || kernel_width % 2 == 0) {
    throw Error(ErrorCode::InvalidArgument, "conv1d 'same' needs an odd kernel width");
  }
  const std::size_t length = input.rows();
  const std::size_t channels = input.cols();
  const std::size_t filters = kernels.rows();
  if (kernels.cols() != kernel_width * channels || bias.rows() != 1 || bias.cols() != filters) {
    throw Error(ErrorCode::ShapeMismatch, "conv1d kernels " + dims(kernels.rows(), kernels.cols()) +
                                              " do not fit input " + dims(length, channels));
  }
  const auto half = static_cast<std::ptrdiff_t>(kernel_width / 2);
  Tensor2 out(length, filters);
  for (std::size_t t = 0; t < length; ++t) {
    auto o = out.row(t);
    for (std::size_t f = 0; f < filters; ++f) o[f] = bias[f];
    for (std::size_t j = 0; j < kernel_width; ++j) {
      const auto src = static_cast<std::ptrdiff_t>(t) + static_cast<std::ptrdiff_t>(j) - half;
      if (src < 0 || src >= static_cast<std::ptrdiff_t>(length)) continue;
      auto x = input.row(static_cast<std::size_t>(src));
      for (std::size_t f = 0; f < filters; ++f) {
        const double* w = kernels.row(f).data() + j * channels;
        double acc = 0.0;
        for (std::size_t c = 0; c < channels; ++c) acc += w[c] * x[c];
        o[f] += acc;
      }
    }
  }
  return out;
}

PoolResult maxpool1d_forward(const Tensor2& input, std::size_t pool) {
  if (pool == 0) throw Error(ErrorCode::InvalidArgument, "pool size must be >= 1");
  const std::size_t out_rows = input.rows() / pool;
  PoolResult r{Tensor2(out_rows, input.cols()), std::vector<std::size_t>(out_rows * input.cols())};
  for (std::size_t o = 0; o < out_rows; ++o) {
    for (std::size_t c = 0; c < input.cols(); ++c) {
      std::size_t best = o * pool;
      for (std::size_t k = 1; k < pool; ++k) {
        if (input(o * pool + k, c) > input(best, c)) best = o * pool + k;
      }
      r.output(o, c) = input(best, c);
      r.argmax[o * input.cols() + c] = best * input.cols() + c;
    }
  }
  return r;
}

Tensor2 dense_forward(const Tensor2& input, const Tensor2& weights, const Tensor2& bias) {
  const std::size_t n = weights.cols();
  const std::size_t m = weights.rows();
  require_vector(input, n, "dense input");
  require_vector(bias, m, "dense bias");
  Tensor2 out(1, m);
  auto x = input.values();
  for (std::size_t i = 0; i < m; ++i) {
    auto w = weights.row(i);
    double acc = bias[i];
    for (std::size_t j = 0; j < n; ++j) acc += w[j] * x[j];
    out[i] = acc;
  }
  return out;
}

Tensor2 dropout_apply(const Tensor2& input, double rate, Mode mode, Rng& rng, std::vector<double>* mask) {
  if (!(rate >= 0.0 && rate < 1.0)) throw Error(ErrorCode::InvalidArgument, "dropout rate must lie in [0,1)");
  if (mode == Mode::Infer || rate == 0.0) {
    if (mask) mask->assign(input.size(), 1.0);
    return input;
  }
  const double keep_scale = 1.0 / (1.0 - rate);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Tensor2 out(input.rows(), input.cols());
  if (mask) mask->resize(input.size());
  for (std::size_t i = 0; i < input.size(); ++i) {
    const double m = u(rng) < rate ? 0.0 : keep_scale;
    out[i] = input[i] * m;
    if (mask) (*mask)[i] = m;
  }
  return out;
}

Tensor2 activation_forward(const Tensor2& input, ActivationKind kind) {
  Tensor2 out(input.rows(), input.cols());
  for (std::size_t i = 0; i < input.size(); ++i) {
    out[i] = kind == ActivationKind::Relu ? relu(input[i]) : sigmoid(input[i]);
  }
  return out;
}

std::size_t Layer::parameter_count() const noexcept {
  std::size_t n = 0;
  for (const auto& p : parameters()) n += p.value.size();
  return n;
}

void Layer::require_cache(bool present) const {
  if (!present) throw Error(ErrorCode::StaleCache, "backward on layer '" + name_ + "' without a cached forward pass");
}

// --- Embedding ---------------------------------------------------------------

Embedding::Embedding(std::size_t vocab_size, std::size_t dim, std::size_t input_length, Rng& rng)
    : input_length_(input_length), table_(make_param("embeddings", vocab_size, dim)) {
  if (vocab_size == 0 || dim == 0 || input_length == 0) {
    throw Error(ErrorCode::InvalidConfig, "embedding dimensions must be positive");
  }
  std::uniform_real_distribution<double> dist(-0.05, 0.05);
  for (double& v : table_.value.values()) v = dist(rng);
}

std::string Embedding::description() const {
  return "Embedding Layer with input length = " + std::to_string(input_length_);
}

Shape Embedding::output_shape(const Shape& input) const {
  if (input.dims != std::vector<std::size_t>{input_length_}) {
    throw Error(ErrorCode::ShapeMismatch, "embedding expects input " + Shape{{input_length_}}.to_string() +
                                              ", got " + input.to_string());
  }
  return {{input_length_, table_.value.cols()}};
}

std::vector<std::uint32_t> Embedding::to_indices(const Tensor2& input) const {
  require_vector(input, input_length_, "embedding input");
  std::vector<std::uint32_t> idx(input.size());
  for (std::size_t i = 0; i < input.size(); ++i) {
    const double v = input[i];
    if (!(v >= 0.0) || v != std::floor(v) || v > static_cast<double>(table_.value.rows())) {
      throw Error(ErrorCode::IndexOutOfRange, "invalid token index " + std::to_string(v));
    }
    idx[i] = static_cast<std::uint32_t>(v);
  }
  return idx;
}

Tensor2 Embedding::infer(const Tensor2& input) const { return embedding_forward(to_indices(input), table_.value); }

Tensor2 Embedding::forward(const Tensor2& input, Mode, Rng&) {
  cache_ = to_indices(input);
  return embedding_forward(*cache_, table_.value);
}

Tensor2 Embedding::backward(const Tensor2& grad_output, bool) {
  require_cache(cache_.has_value());
  const auto& idx = *cache_;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] == 0) continue;  // padding row is frozen
    auto g = grad_output.row(i);
    auto dst = table_.grad.row(idx[i] - 1);
    for (std::size_t k = 0; k < g.size(); ++k) dst[k] += g[k];
  }
  cache_.reset();
  return {};
}

// --- Conv1dSame --------------------------------------------------------------

Conv1dSame::Conv1dSame(std::size_t in_channels, std::size_t filters, std::size_t kernel_width, Rng& rng)
    : in_channels_(in_channels), filters_(filters), kernel_width_(kernel_width) {
  if (in_channels == 0 || filters == 0) throw Error(ErrorCode::InvalidConfig, "conv1d dimensions must be positive");
  if (kernel_width == 0 || kernel_width % 2 == 0) throw Error(ErrorCode::InvalidConfig, "conv1d kernel width must be odd");
  params_.push_back(make_param("kernel", filters, kernel_width * in_channels));
  params_.push_back(make_param("bias", 1, filters));
  glorot_uniform(params_[0].value, kernel_width * in_channels, kernel_width * filters, rng);
}

std::string Conv1dSame::description() const {
  return "Conv1D Layer with " + std::to_string(filters_) + " filters";
}

Shape Conv1dSame::output_shape(const Shape& input) const {
  if (input.dims.size() != 2 || input.dims[1] != in_channels_) {
    throw Error(ErrorCode::ShapeMismatch, "conv1d expects (L, " + std::to_string(in_channels_) + "), got " +
                                              input.to_string());
  }
  return {{input.dims[0], filters_}};
}

Tensor2 Conv1dSame::infer(const Tensor2& input) const {
  return conv1d_same_forward(input, params_[0].value, params_[1].value, kernel_width_);
}

Tensor2 Conv1dSame::forward(const Tensor2& input, Mode, Rng&) {
  auto out = infer(input);
  cache_ = input;
  return out;
}

Tensor2 Conv1dSame::backward(const Tensor2& grad_output, bool need_input_grad) {
  require_cache(cache_.has_value());
  const Tensor2& x = *cache_;
  const std::size_t length = x.rows();
  const std::size_t channels = in_channels_;
  const auto half = static_cast<std::ptrdiff_t>(kernel_width_ / 2);
  if (grad_output.rows() != length || grad_output.cols() != filters_) {
    throw Error(ErrorCode::ShapeMismatch, "conv1d upstream gradient has the wrong shape");
  }
  Tensor2& dk = params_[0].grad;
  Tensor2& db = params_[1].grad;
  const Tensor2& w = params_[0].value;
  Tensor2 dx;
  if (need_input_grad) dx = Tensor2(length, channels);

  for (std::size_t t = 0; t < length; ++t) {
    auto g = grad_output.row(t);
    for (std::size_t f = 0; f < filters_; ++f) db[f] += g[f];
    for (std::size_t j = 0; j < kernel_width_; ++j) {
      const auto src = static_cast<std::ptrdiff_t>(t) + static_cast<std::ptrdiff_t>(j) - half;
      if (src < 0 || src >= static_cast<std::ptrdiff_t>(length)) continue;
      auto xs = x.row(static_cast<std::size_t>(src));
      for (std::size_t f = 0; f < filters_; ++f) {
        const double gf = g[f];
        if (gf == 0.0) continue;
        double* dkr = &dk(f, j * channels);
        for (std::size_t c = 0; c < channels; ++c) dkr[c] += gf * xs[c];
        if (need_input_grad) {
          const double* wr = w.row(f).data() + j * channels;
          auto dxs = dx.row(static_cast<std::size_t>(src));
          for (std::size_t c = 0; c < channels; ++c) dxs[c] += gf * wr[c];
        }
      }
    }
  }
  cache_.reset();
  return dx;
}

// --- MaxPool1d ---------------------------------------------------------------

MaxPool1d::MaxPool1d(std::size_t pool) : pool_(pool) {
  if (pool == 0) throw Error(ErrorCode::InvalidConfig, "pool size must be >= 1");
}

std::string MaxPool1d::description() const {
  return "MaxPooling1D Layer with pool size = " + std::to_string(pool_);
}

Shape MaxPool1d::output_shape(const Shape& input) const {
  if (input.dims.size() != 2 || input.dims[0] < pool_) {
    throw Error(ErrorCode::ShapeMismatch, "maxpool needs (L >= pool, C), got " + input.to_string());
  }
  return {{input.dims[0] / pool_, input.dims[1]}};
}

Tensor2 MaxPool1d::infer(const Tensor2& input) const { return maxpool1d_forward(input, pool_).output; }

Tensor2 MaxPool1d::forward(const Tensor2& input, Mode, Rng&) {
  auto r = maxpool1d_forward(input, pool_);
  cache_ = Cache{input.rows(), input.cols(), std::move(r.argmax)};
  return std::move(r.output);
}

Tensor2 MaxPool1d::backward(const Tensor2& grad_output, bool need_input_grad) {
  require_cache(cache_.has_value());
  Tensor2 dx;
  if (need_input_grad) {
    dx = Tensor2(cache_->in_rows, cache_->in_cols);
    for (std::size_t i = 0; i < cache_->argmax.size(); ++i) dx[cache_->argmax[i]] += grad_output[i];
  }
  cache_.reset();
  return dx;
}

// --- Flatten -----------------------------------------------------------------

Shape Flatten::output_shape(const Shape& input) const { return {{input.elements()}}; }

Tensor2 Flatten::infer(const Tensor2& input) const {
  return Tensor2(1, input.size(), std::vector<double>(input.values().begin(), input.values().end()));
}

Tensor2 Flatten::forward(const Tensor2& input, Mode, Rng&) {
  cache_ = std::make_pair(input.rows(), input.cols());
  return infer(input);
}

Tensor2 Flatten::backward(const Tensor2& grad_output, bool need_input_grad) {
  require_cache(cache_.has_value());
  Tensor2 dx;
  if (need_input_grad) {
    dx = Tensor2(cache_->first, cache_->second,
                 std::vector<double>(grad_output.values().begin(), grad_output.values().end()));
  }
  cache_.reset();
  return dx;
}

// --- Dense -------------------------------------------------------------------

Dense::Dense(std::size_t inputs, std::size_t units, Rng& rng) : inputs_(inputs), units_(units) {
  if (inputs == 0 || units == 0) throw Error(ErrorCode::InvalidConfig, "dense dimensions must be positive");
  params_.push_back(make_param("kernel", units, inputs));
  params_.push_back(make_param("bias", 1, units));
  glorot_uniform(params_[0].value, inputs, units, rng);
}

std::string Dense::description() const { return "Dense Layer with " + std::to_string(units_) + " neurons"; }

Shape Dense::output_shape(const Shape& input) const {
  if (input.dims != std::vector<std::size_t>{inputs_}) {
    throw Error(ErrorCode::ShapeMismatch, "dense expects (" + std::to_string(inputs_) + ",), got " + input.to_string());
  }
  return {{units_}};
}

Tensor2 Dense::infer(const Tensor2& input) const { return dense_forward(input, params_[0].value, params_[1].value); }

Tensor2 Dense::forward(const Tensor2& input, Mode, Rng&) {
  auto out = infer(input);
  cache_ = input;
  return out;
}

Tensor2 Dense::backward(const Tensor2& grad_output, bool need_input_grad) {
  require_cache(cache_.has_value());
  require_vector(grad_output, units_, "dense upstream gradient");
  const Tensor2& x = *cache_;
  Tensor2& dw = params_[0].grad;
  add_into(params_[1].grad, grad_output);
  // TF-IDF inputs are mostly zeros; touch only the active columns
  std::vector<std::size_t> active;
  for (std::size_t j = 0; j < inputs_; ++j) {
    if (x[j] != 0.0) active.push_back(j);
  }
  for (std::size_t i = 0; i < units_; ++i) {
    const double g = grad_output[i];
    if (g == 0.0) continue;
    auto dwr = dw.row(i);
    for (auto j : active) dwr[j] += g * x[j];
  }
  Tensor2 dx;
  if (need_input_grad) {
    dx = Tensor2(1, inputs_);
    const Tensor2& w = params_[0].value;
    for (std::size_t i = 0; i < units_; ++i) {
      const double g = grad_output[i];
      if (g == 0.0) continue;
      auto wr = w.row(i);
      for (std::size_t j = 0; j < inputs_; ++j) dx[j] += g * wr[j];
    }
  }
  cache_.reset();
  return dx;
}

// --- Dropout -----------------------------------------------------------------

Dropout::Dropout(double rate) : rate_(rate) {
  if (!(rate >= 0.0 && rate < 1.0)) throw Error(ErrorCode::InvalidConfig, "dropout rate must lie in [0,1)");
}

std::string Dropout::description() const {
  std::string r = std::to_string(rate_);
  r.erase(r.find_last_not_of('0') + 1);
  if (!r.empty() && r.back() == '.') r.pop_back();
  return "Dropout Layer with rate = " + r;
}

Tensor2 Dropout::forward(const Tensor2& input, Mode mode, Rng& rng) {
  std::vector<double> mask;
  auto out = dropout_apply(input, rate_, mode, rng, &mask);
  mask_ = std::move(mask);
  return out;
}

Tensor2 Dropout::backward(const Tensor2& grad_output, bool) {
  require_cache(mask_.has_value());
  Tensor2 dx(grad_output.rows(), grad_output.cols());
  for (std::size_t i = 0; i < dx.size(); ++i) dx[i] = grad_output[i] * (*mask_)[i];
  mask_.reset();
  return dx;
}

// --- Activation --------------------------------------------------------------

std::string Activation::description() const { return "Activation " + std::string(activation_name(fn_)); }

Tensor2 Activation::infer(const Tensor2& input) const { return activation_forward(input, fn_); }

Tensor2 Activation::forward(const Tensor2& input, Mode, Rng&) {
  auto out = infer(input);
  cache_ = out;
  return out;
}

Tensor2 Activation::backward(const Tensor2& grad_output, bool) {
  require_cache(cache_.has_value());
  const Tensor2& y = *cache_;
  Tensor2 dx(grad_output.rows(), grad_output.cols());
  for (std::size_t i = 0; i < dx.size(); ++i) {
    const double d = fn_ == ActivationKind::Relu ? (y[i] > 0.0 ? 1.0 : 0.0) : y[i] * (1.0 - y[i]);
    dx[i] = grad_output[i] * d;
  }
  cache_.reset();
  return dx;
}

}  // namespace genreflow::nn
