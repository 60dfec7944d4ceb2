// Copyright 2026 The saf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "saf/error.hpp"

namespace saf {

enum class Precision { Single, Double };

inline std::string_view to_string(Precision p) {
  return p == Precision::Single ? "single" : "double";
}

inline Precision parse_precision(std::string_view s) {
  if (s == "single" || s == "f32") return Precision::Single;
  if (s == "double" || s == "f64") return Precision::Double;
  throw UsageError("unknown precision '" + std::string(s) + "'");
}

using Shape = std::vector<std::size_t>;

inline constexpr std::size_t kMaxRank = 4;

inline std::size_t shape_size(std::span<const std::size_t> shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

inline std::string shape_string(std::span<const std::size_t> shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "," : "") << shape[i];
  os << ']';
  return os.str();
}

/// Rounds `v` to the nearest value representable in `p`.
inline double round_to(double v, Precision p) {
  return p == Precision::Single ? static_cast<double>(static_cast<float>(v)) : v;
}

/// Dense row-major tensor of rank <= 4.
///
/// Elements are stored as doubles whatever the precision tag; a Single tensor
/// only ever holds values that are exactly representable as float. NaN and
/// infinities are ordinary data here.
class Tensor {
 public:
  Tensor() = default;

  Tensor(Shape shape, std::vector<double> values,
         Precision precision = Precision::Double)
      : shape_(std::move(shape)), values_(std::move(values)), precision_(precision) {
    if (shape_.size() > kMaxRank)
      throw UsageError("tensor rank " + std::to_string(shape_.size()) +
                       " exceeds " + std::to_string(kMaxRank));
    if (shape_size(shape_) != values_.size())
      throw UsageError("shape " + shape_string(shape_) + " does not hold " +
                       std::to_string(values_.size()) + " elements");
    if (precision_ == Precision::Single)
      for (auto& v : values_) v = round_to(v, precision_);
  }

  static Tensor filled(Shape shape, double value,
                       Precision precision = Precision::Double) {
    std::vector<double> v(shape_size(shape), value);
    return Tensor(std::move(shape), std::move(v), precision);
  }

  static Tensor zeros(Shape shape) { return filled(std::move(shape), 0.0); }

  /// Rank-1 tensor from a list of values.
  static Tensor vector(std::initializer_list<double> values,
                       Precision precision = Precision::Double) {
    return Tensor({values.size()}, std::vector<double>(values), precision);
  }

  static Tensor scalar(double value, Precision precision = Precision::Double) {
    return Tensor({1}, {value}, precision);
  }

  const Shape& shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }
  Precision precision() const noexcept { return precision_; }

  std::span<const double> values() const noexcept { return values_; }
  std::vector<double>& mutable_values() noexcept { return values_; }

  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

  /// Size of the last axis (1 for scalars stored as rank 0).
  std::size_t inner() const { return shape_.empty() ? 1 : shape_.back(); }
  std::size_t outer() const { return inner() == 0 ? 0 : size() / inner(); }

  /// Copy rounded to `p` and tagged with it.
  Tensor as(Precision p) const { return Tensor(shape_, values_, p); }

  Tensor reshaped(Shape shape) const {
    if (shape_size(shape) != size())
      throw UsageError("cannot reshape " + shape_string(shape_) + " to " +
                       shape_string(shape));
    return Tensor(std::move(shape), values_, precision_);
  }

  bool all_finite() const {
    return std::all_of(values_.begin(), values_.end(),
                       [](double v) { return std::isfinite(v); });
  }

  /// Exact element equality; NaNs compare equal to NaNs.
  bool identical(const Tensor& o) const {
    if (shape_ != o.shape_ || precision_ != o.precision_) return false;
    for (std::size_t i = 0; i < values_.size(); ++i) {
      const double a = values_[i], b = o.values_[i];
      if (std::isnan(a) && std::isnan(b)) continue;
      if (a != b || std::signbit(a) != std::signbit(b)) return false;
    }
    return true;
  }

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  Shape shape_;
  std::vector<double> values_;
  Precision precision_ = Precision::Double;
};

}  // namespace saf
