#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace genreflow::nn {

using Rng = std::mt19937_64;

/// Dense row-major matrix of doubles. Vectors are 1 x n.
class Tensor2 {
 public:
  Tensor2() = default;
  Tensor2(std::size_t rows, std::size_t cols, double fill = 0.0);
  /// Throws ShapeMismatch unless values.size() == rows * cols.
  Tensor2(std::size_t rows, std::size_t cols, std::vector<double> values);

  static Tensor2 row_vector(std::vector<double> values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  double& operator()(std::size_t r, std::size_t c) noexcept { return values_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return values_[r * cols_ + c]; }
  double& operator[](std::size_t i) noexcept { return values_[i]; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> row(std::size_t r) noexcept { return {values_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const noexcept { return {values_.data() + r * cols_, cols_}; }

  void fill(double v) noexcept;
  bool all_finite() const noexcept;
  bool same_shape(const Tensor2& other) const noexcept { return rows_ == other.rows_ && cols_ == other.cols_; }

  friend bool operator==(const Tensor2&, const Tensor2&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

/// Throws NonFinite naming `what` if any entry is NaN or infinite.
void require_finite(const Tensor2& t, std::string_view what);

/// Logical shape of a layer input/output: (n,) or (rows, cols).
struct Shape {
  std::vector<std::size_t> dims;

  std::size_t elements() const noexcept;
  std::string to_string() const;
  friend bool operator==(const Shape&, const Shape&) = default;
};

}  // namespace genreflow::nn
