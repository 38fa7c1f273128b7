// Copyright 2026 The renewnat Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef RENEWNAT_NUMERICS_TAPE_HPP_
#define RENEWNAT_NUMERICS_TAPE_HPP_

#include <cstddef>
#include <deque>
#include <functional>
#include <initializer_list>
#include <limits>
#include <string>
#include <unordered_map>

#include "renewnat/numerics/array.hpp"
#include "renewnat/numerics/parameter_store.hpp"

RENEWNAT_NAMESPACE_BEGIN

// Handle to a value recorded on a Tape.
struct Var {
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::size_t id = kNone;
  bool valid() const { return id != kNone; }
};

// Dynamically recorded reverse-mode tape over coarse ops.
//
// A tape built with record=false evaluates forward only: no backward closures
// are kept and nothing requires a gradient. Parameters are referenced, not
// copied, so the ParameterStore must outlive the tape and must not be mutated
// while the tape is alive.
class Tape {
 public:
  using Backward = std::function<void(Tape&, const Array& grad_out)>;

  explicit Tape(bool record = true) : record_(record) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  bool recording() const { return record_; }

  Var constant(Array value);
  // One node per parameter name per tape.
  Var parameter(const Param& param);

  const Array& value(Var v) const;
  bool requires_grad(Var v) const { return v.valid() && nodes_[v.id].requires_grad; }
  // Gradient accumulator for v, zero-initialised on first access.
  Array& grad(Var v);
  // nullptr when no gradient reached v.
  const Array* grad_if_any(Var v) const;

  // Records the result of an op. The node requires a gradient iff the tape is
  // recording and any input does; `backward` is dropped otherwise.
  Var push(Array value, std::initializer_list<Var> inputs, Backward backward);

  // Seeds d(loss)/d(loss) = 1 and propagates to every reachable node.
  void backward(Var loss);

  // Adds this tape's parameter gradients into `store` and marks each
  // parameter referenced by the tape as having a gradient.
  void accumulate_gradients(ParameterStore& store) const;

  std::size_t node_count() const { return nodes_.size(); }

 private:
  struct Node {
    Array value;
    const Array* external = nullptr;
    Array grad;
    bool has_grad = false;
    bool requires_grad = false;
    Backward backward;
    std::string param_name;
  };

  std::deque<Node> nodes_;
  std::unordered_map<std::string, std::size_t> param_nodes_;
  bool record_;
};

RENEWNAT_NAMESPACE_END

#endif  // RENEWNAT_NUMERICS_TAPE_HPP_
