#include "genreflow/nn/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "genreflow/error.hpp"

namespace genreflow::nn {

Tensor2::Tensor2(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

Tensor2::Tensor2(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows * cols) {
    throw Error(ErrorCode::ShapeMismatch, std::to_string(values_.size()) + " values for a " + std::to_string(rows) +
                                              "x" + std::to_string(cols) + " tensor");
  }
}

Tensor2 Tensor2::row_vector(std::vector<double> values) {
  const auto n = values.size();
  return Tensor2(1, n, std::move(values));
}

void Tensor2::fill(double v) noexcept { std::fill(values_.begin(), values_.end(), v); }

bool Tensor2::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

void require_finite(const Tensor2& t, std::string_view what) {
  if (!t.all_finite()) throw Error(ErrorCode::NonFinite, std::string(what) + " produced NaN or Inf");
}

std::size_t Shape::elements() const noexcept {
  std::size_t n = 1;
  for (auto d : dims) n *= d;
  return n;
}

std::string Shape::to_string() const {
  std::string out = "(";
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(dims[i]);
  }
  if (dims.size() == 1) out += ",";
  out += ")";
  return out;
}

}  // namespace genreflow::nn
