// Copyright 2026 The renewnat Authors.
// SPDX-License-Identifier: Apache-2.0

#include "renewnat/numerics/parameter_store.hpp"

#include <algorithm>
#include <cmath>

RENEWNAT_NAMESPACE_BEGIN

Param& ParameterStore::add(std::string name, Array init) {
  if (index_.contains(name)) {
    throw InvariantError("duplicate parameter name: " + name);
  }
  Param p;
  p.name = name;
  p.grad = Array::zeros(init.shape());
  p.m = Array::zeros(init.shape());
  p.v = Array::zeros(init.shape());
  p.value = std::move(init);
  index_.emplace(std::move(name), params_.size());
  params_.push_back(std::move(p));
  return params_.back();
}

bool ParameterStore::contains(std::string_view name) const {
  return index_.contains(std::string(name));
}

Param& ParameterStore::at(std::string_view name) {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) throw InvariantError("unknown parameter: " + std::string(name));
  return params_[it->second];
}

const Param& ParameterStore::at(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) throw InvariantError("unknown parameter: " + std::string(name));
  return params_[it->second];
}

std::size_t ParameterStore::parameter_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.value.size();
  return n;
}

void ParameterStore::zero_grad() {
  for (auto& p : params_) {
    p.grad.fill(0);
    p.has_grad = false;
  }
}

void adam_step(ParameterStore& store, const AdamConfig& config) {
  for (const auto& p : store) {
    if (!p.has_grad) throw InvariantError("adam_step: missing gradient for " + p.name);
  }
  const std::uint64_t t = store.step() + 1;
  const double correction1 = 1.0 - std::pow(config.beta1, static_cast<double>(t));
  const double correction2 = 1.0 - std::pow(config.beta2, static_cast<double>(t));
  const auto b1 = static_cast<Scalar>(config.beta1);
  const auto b2 = static_cast<Scalar>(config.beta2);
  const auto step_size = static_cast<Scalar>(config.lr / correction1);
  const auto inv_c2 = static_cast<Scalar>(1.0 / correction2);
  const auto eps = static_cast<Scalar>(config.eps);

  for (auto& p : store) {
    auto value = p.value.data();
    auto grad = p.grad.data();
    auto m = p.m.data();
    auto v = p.v.data();
    for (std::size_t i = 0; i < value.size(); ++i) {
      const Scalar g = grad[i];
      m[i] = b1 * m[i] + (1 - b1) * g;
      v[i] = b2 * v[i] + (1 - b2) * g * g;
      value[i] -= step_size * m[i] / (std::sqrt(v[i] * inv_c2) + eps);
    }
  }
  store.set_step(t);
  store.zero_grad();
}

double inverse_sqrt_lr(double peak, std::uint64_t warmup, std::uint64_t step) {
  const double s = static_cast<double>(std::max<std::uint64_t>(step, 1));
  if (warmup == 0) return peak;
  const double w = static_cast<double>(warmup);
  return peak * std::min(s / w, std::sqrt(w / s));
}

RENEWNAT_NAMESPACE_END
