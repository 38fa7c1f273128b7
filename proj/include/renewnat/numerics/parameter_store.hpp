// Copyright 2026 The renewnat Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef RENEWNAT_NUMERICS_PARAMETER_STORE_HPP_
#define RENEWNAT_NUMERICS_PARAMETER_STORE_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "renewnat/numerics/array.hpp"

RENEWNAT_NAMESPACE_BEGIN

struct Param {
  std::string name;
  Array value;
  Array grad;
  // Adam moments.
  Array m;
  Array v;
  // Set once a backward pass has written (possibly zero) gradients.
  bool has_grad = false;
};

// All learnable arrays of a model, in insertion order.
class ParameterStore {
 public:
  Param& add(std::string name, Array init);

  bool contains(std::string_view name) const;
  Param& at(std::string_view name);
  const Param& at(std::string_view name) const;

  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }
  std::size_t size() const { return params_.size(); }
  std::size_t parameter_count() const;

  std::uint64_t step() const { return step_; }
  void set_step(std::uint64_t step) { step_ = step; }

  void zero_grad();

 private:
  std::vector<Param> params_;
  std::unordered_map<std::string, std::size_t> index_;
  std::uint64_t step_ = 0;
};

struct AdamConfig {
  double lr = 5e-4;
  double beta1 = 0.9;
  double beta2 = 0.98;
  double eps = 1e-8;
};

// One bias-corrected Adam update over every parameter. Throws InvariantError
// if any parameter lacks a gradient. Gradients are zeroed afterwards.
void adam_step(ParameterStore& store, const AdamConfig& config);

// Linear warmup to `peak` over `warmup` steps, then inverse square root decay.
double inverse_sqrt_lr(double peak, std::uint64_t warmup, std::uint64_t step);

RENEWNAT_NAMESPACE_END

#endif  // RENEWNAT_NUMERICS_PARAMETER_STORE_HPP_
