// Copyright 2026 The renewnat Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Differentiable ops recorded on a Tape. Arrays are read as matrices
// (rows x cols, see Array::rows / Array::cols).

#ifndef RENEWNAT_NUMERICS_OPS_HPP_
#define RENEWNAT_NUMERICS_OPS_HPP_

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "renewnat/numerics/rng.hpp"
#include "renewnat/numerics/tape.hpp"

RENEWNAT_NAMESPACE_BEGIN

using TokenId = std::int32_t;

// a[n x k] * b[k x m], or a * b^T when transpose_b (b is [m x k]).
Var matmul(Tape& tape, Var a, Var b, bool transpose_b = false);

// x[n x in] * weight[in x out] + bias[out]. `bias` may be an invalid Var.
Var linear(Tape& tape, Var x, Var weight, Var bias);

Var add(Tape& tape, Var a, Var b);
Var scale(Tape& tape, Var a, Scalar factor);
Var relu(Tape& tape, Var x);

// Normalises each row, then applies gain and bias (both [cols]).
Var layer_norm(Tape& tape, Var x, Var gain, Var bias, Scalar eps = Scalar(1e-5));

// Rows of `table` selected by `ids`, multiplied by `factor`. Throws
// ShapeError for an id outside the table.
Var embedding(Tape& tape, Var table, std::span<const TokenId> ids, Scalar factor);

// Inverted dropout; identity when p == 0.
Var dropout(Tape& tape, Var x, Scalar p, Rng& rng);

// out[r] = sum_k weight_k * x[source_k] for each output row r.
using RowMix = std::vector<std::vector<std::pair<std::size_t, Scalar>>>;
Var mix_rows(Tape& tape, Var x, const RowMix& mix);

// out[r] = take_b[r] ? b[r] : a[r].
Var select_rows(Tape& tape, Var a, Var b, std::span<const std::uint8_t> take_b);

// Batched multi-head scaled dot-product attention core (no projections).
// q is [batch*query_len x d]; k and v are [batch*key_len x d]. Key j of batch
// item b is visible iff j < key_lengths[b] and, in causal mode, j <= i.
struct AttentionLayout {
  std::size_t batch = 1;
  std::size_t query_len = 0;
  std::size_t key_len = 0;
  std::size_t heads = 1;
  std::vector<std::size_t> key_lengths;
  bool causal = false;
};
Var attention(Tape& tape, Var q, Var k, Var v, const AttentionLayout& layout);

// Mean over included rows of -sum_c q_c log softmax(logits)_c, where q is the
// one-hot target smoothed by `label_smoothing`. Rows with include[r] == 0 get
// exactly zero gradient. Throws DegenerateBatchError if no row is included.
Var cross_entropy(Tape& tape, Var logits, std::span<const TokenId> targets,
                  std::span<const std::uint8_t> include, Scalar label_smoothing = 0);

RENEWNAT_NAMESPACE_END

#endif  // RENEWNAT_NUMERICS_OPS_HPP_
