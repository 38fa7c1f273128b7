// Copyright 2026 The renewnat Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef RENEWNAT_NUMERICS_ARRAY_HPP_
#define RENEWNAT_NUMERICS_ARRAY_HPP_

#include <cstddef>
#include <new>
#include <span>
#include <vector>

#include "renewnat/base.hpp"

RENEWNAT_NAMESPACE_BEGIN

using Shape = std::vector<std::size_t>;

std::size_t shape_size(const Shape& shape);

// Cache-line aligned storage so vectorised kernels see the same alignment on
// every run and produce bitwise identical sums.
template <typename T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::align_val_t kAlignment{64};

  AlignedAllocator() = default;
  template <typename U>
  AlignedAllocator(const AlignedAllocator<U>&) {}

  T* allocate(std::size_t n) {
    return static_cast<T*>(::operator new(n * sizeof(T), kAlignment));
  }
  void deallocate(T* p, std::size_t) { ::operator delete(p, kAlignment); }

  template <typename U>
  bool operator==(const AlignedAllocator<U>&) const { return true; }
};

// Dense row-major array. Values are plain data; gradients live on the tape
// or in the ParameterStore, never on the array itself.
//
// Most ops treat an array as a matrix: cols() is the last dimension and
// rows() is the product of the others. A rank-0 array is a scalar.
class Array {
 public:
  Array() = default;
  explicit Array(Shape shape);
  Array(Shape shape, std::vector<Scalar> data);

  static Array zeros(Shape shape) { return Array(std::move(shape)); }
  static Array filled(Shape shape, Scalar value);
  static Array scalar(Scalar value) { return Array({}, {value}); }
  static Array matrix(std::size_t rows, std::size_t cols,
                      std::vector<Scalar> data);

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }
  std::size_t rows() const;
  std::size_t cols() const;

  std::span<Scalar> data() { return data_; }
  std::span<const Scalar> data() const { return data_; }
  Scalar* ptr() { return data_.data(); }
  const Scalar* ptr() const { return data_.data(); }

  std::span<Scalar> row(std::size_t r) { return data().subspan(r * cols(), cols()); }
  std::span<const Scalar> row(std::size_t r) const {
    return data().subspan(r * cols(), cols());
  }

  Scalar& operator[](std::size_t i) { return data_[i]; }
  Scalar operator[](std::size_t i) const { return data_[i]; }
  Scalar& at(std::size_t r, std::size_t c) { return data_[r * cols() + c]; }
  Scalar at(std::size_t r, std::size_t c) const { return data_[r * cols() + c]; }

  // Scalar value of a rank-0 or single-element array.
  Scalar item() const;

  void fill(Scalar value);
  Array reshaped(Shape shape) const;
  bool same_shape(const Array& other) const { return shape_ == other.shape_; }

  friend bool operator==(const Array&, const Array&) = default;

 private:
  Shape shape_;
  std::vector<Scalar, AlignedAllocator<Scalar>> data_;
};

std::string shape_string(const Shape& shape);

void require_same_shape(const Array& a, const Array& b, const char* what);

// --- tape-free helpers -------------------------------------------------------

// Softmax along `axis`, max-subtracted.
Array softmax(const Array& x, std::size_t axis);

// Row-wise log-softmax over the last axis.
Array log_softmax_rows(const Array& x);

// Index of the maximum per row; ties resolve to the lower index.
std::vector<std::size_t> argmax_rows(const Array& x);

RENEWNAT_NAMESPACE_END

#endif  // RENEWNAT_NUMERICS_ARRAY_HPP_
