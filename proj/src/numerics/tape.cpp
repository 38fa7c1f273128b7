// Copyright 2026 The renewnat Authors.
// SPDX-License-Identifier: Apache-2.0

#include "renewnat/numerics/tape.hpp"

#include <algorithm>

RENEWNAT_NAMESPACE_BEGIN

Var Tape::constant(Array value) {
  Node node;
  node.value = std::move(value);
  nodes_.push_back(std::move(node));
  return Var{nodes_.size() - 1};
}

Var Tape::parameter(const Param& param) {
  if (auto it = param_nodes_.find(param.name); it != param_nodes_.end()) {
    return Var{it->second};
  }
  Node node;
  node.external = &param.value;
  node.requires_grad = record_;
  node.param_name = param.name;
  nodes_.push_back(std::move(node));
  param_nodes_.emplace(param.name, nodes_.size() - 1);
  return Var{nodes_.size() - 1};
}

const Array& Tape::value(Var v) const {
  const Node& node = nodes_.at(v.id);
  return node.external ? *node.external : node.value;
}

Array& Tape::grad(Var v) {
  Node& node = nodes_.at(v.id);
  if (!node.has_grad) {
    node.grad = Array::zeros(value(v).shape());
    node.has_grad = true;
  }
  return node.grad;
}

const Array* Tape::grad_if_any(Var v) const {
  const Node& node = nodes_.at(v.id);
  return node.has_grad ? &node.grad : nullptr;
}

Var Tape::push(Array value, std::initializer_list<Var> inputs, Backward backward) {
  Node node;
  node.value = std::move(value);
  if (record_) {
    node.requires_grad = std::any_of(inputs.begin(), inputs.end(),
                                     [&](Var in) { return requires_grad(in); });
    if (node.requires_grad) node.backward = std::move(backward);
  }
  nodes_.push_back(std::move(node));
  return Var{nodes_.size() - 1};
}

void Tape::backward(Var loss) {
  if (!record_) throw InvariantError("backward() on a non-recording tape");
  if (value(loss).size() != 1) throw ShapeError("backward() needs a scalar loss");
  if (!requires_grad(loss)) return;
  grad(loss).fill(1);
  for (std::size_t i = loss.id + 1; i-- > 0;) {
    Node& node = nodes_[i];
    if (!node.has_grad || !node.backward) continue;
    node.backward(*this, node.grad);
  }
}

void Tape::accumulate_gradients(ParameterStore& store) const {
  for (const auto& [name, id] : param_nodes_) {
    Param& p = store.at(name);
    const Node& node = nodes_[id];
    if (node.has_grad) {
      auto dst = p.grad.data();
      auto src = node.grad.data();
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
    }
    p.has_grad = true;
  }
}

RENEWNAT_NAMESPACE_END
