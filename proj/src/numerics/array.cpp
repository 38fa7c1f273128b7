// Copyright 2026 The renewnat Authors.
// SPDX-License-Identifier: Apache-2.0

#include "renewnat/numerics/array.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

RENEWNAT_NAMESPACE_BEGIN

std::size_t shape_size(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

std::string shape_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << 'x';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

void require_same_shape(const Array& a, const Array& b, const char* what) {
  if (!a.same_shape(b)) {
    throw ShapeError(std::string(what) + ": shape mismatch " +
                     shape_string(a.shape()) + " vs " + shape_string(b.shape()));
  }
}

Array::Array(Shape shape) : shape_(std::move(shape)), data_(shape_size(shape_)) {}

Array::Array(Shape shape, std::vector<Scalar> data)
    : shape_(std::move(shape)), data_(data.begin(), data.end()) {
  if (shape_size(shape_) != data_.size()) {
    throw ShapeError("array data length " + std::to_string(data_.size()) +
                     " does not match shape " + shape_string(shape_));
  }
}

Array Array::filled(Shape shape, Scalar value) {
  Array a(std::move(shape));
  a.fill(value);
  return a;
}

Array Array::matrix(std::size_t rows, std::size_t cols, std::vector<Scalar> data) {
  return Array({rows, cols}, std::move(data));
}

std::size_t Array::rows() const {
  if (shape_.empty()) return 1;
  std::size_t r = 1;
  for (std::size_t i = 0; i + 1 < shape_.size(); ++i) r *= shape_[i];
  return r;
}

std::size_t Array::cols() const { return shape_.empty() ? 1 : shape_.back(); }

Scalar Array::item() const {
  if (data_.size() != 1) {
    throw ShapeError("item() on array of shape " + shape_string(shape_));
  }
  return data_[0];
}

void Array::fill(Scalar value) { std::fill(data_.begin(), data_.end(), value); }

Array Array::reshaped(Shape shape) const {
  if (shape_size(shape) != data_.size()) {
    throw ShapeError("cannot reshape " + shape_string(shape_) + " to " +
                     shape_string(shape));
  }
  Array out = *this;
  out.shape_ = std::move(shape);
  return out;
}

Array softmax(const Array& x, std::size_t axis) {
  if (axis >= x.rank()) {
    throw ShapeError("softmax axis " + std::to_string(axis) +
                     " invalid for shape " + shape_string(x.shape()));
  }
  const auto& shape = x.shape();
  std::size_t inner = 1;
  for (std::size_t i = axis + 1; i < shape.size(); ++i) inner *= shape[i];
  const std::size_t extent = shape[axis];
  const std::size_t outer = x.size() / std::max<std::size_t>(extent * inner, 1);

  Array out(shape);
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t in = 0; in < inner; ++in) {
      const std::size_t base = o * extent * inner + in;
      Scalar peak = -std::numeric_limits<Scalar>::infinity();
      for (std::size_t k = 0; k < extent; ++k) peak = std::max(peak, x[base + k * inner]);
      Scalar total = 0;
      for (std::size_t k = 0; k < extent; ++k) {
        const Scalar e = std::exp(x[base + k * inner] - peak);
        out[base + k * inner] = e;
        total += e;
      }
      for (std::size_t k = 0; k < extent; ++k) out[base + k * inner] /= total;
    }
  }
  return out;
}

Array log_softmax_rows(const Array& x) {
  Array out(x.shape());
  const std::size_t cols = x.cols();
  for (std::size_t r = 0; r < x.rows(); ++r) {
    auto in = x.row(r);
    auto dst = out.row(r);
    const Scalar peak = *std::max_element(in.begin(), in.end());
    Scalar total = 0;
    for (std::size_t c = 0; c < cols; ++c) total += std::exp(in[c] - peak);
    const Scalar log_z = peak + std::log(total);
    for (std::size_t c = 0; c < cols; ++c) dst[c] = in[c] - log_z;
  }
  return out;
}

std::vector<std::size_t> argmax_rows(const Array& x) {
  std::vector<std::size_t> out(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    auto in = x.row(r);
    out[r] = static_cast<std::size_t>(std::max_element(in.begin(), in.end()) - in.begin());
  }
  return out;
}

RENEWNAT_NAMESPACE_END
