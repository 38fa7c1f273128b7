// Copyright 2026 The renewnat Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Autoregressive encoder-decoder used to distill training targets. It shares
// the encoder and layer code with the non-autoregressive model; the decoder
// input is [BOS] y_1 .. y_T under a causal mask and the output is y_1 .. [EOS].

#ifndef RENEWNAT_MODEL_TEACHER_HPP_
#define RENEWNAT_MODEL_TEACHER_HPP_

#include <span>
#include <vector>

#include "renewnat/data/batch.hpp"
#include "renewnat/transformer/layers.hpp"

RENEWNAT_NAMESPACE_BEGIN

void init_teacher(ParameterStore& store, const ModelConfig& config, Rng& rng);

// [batch * T x V] logits for a grid of decoder inputs under the causal mask.
Var teacher_logits(ForwardContext& ctx, const EncoderOutput& enc, const PaddedTokens& inputs);

// Token-level cross-entropy of y_1 .. y_T [EOS].
Var teacher_loss(ForwardContext& ctx, const Batch& batch, double label_smoothing);

// Sum of log p(y_t | y_<t, X) over target tokens followed by [EOS].
double teacher_sequence_log_prob(const ParameterStore& params, const ModelConfig& config,
                                 std::span<const TokenId> source,
                                 std::span<const TokenId> target);

// Incremental decoding with cached keys and values. Each live hypothesis is a
// row; step() appends one token per row and returns [rows x V] log-probs.
class TeacherDecoderState {
 public:
  TeacherDecoderState(const ParameterStore& params, const ModelConfig& config,
                      std::span<const TokenId> source);

  // parents[r] is the row of the previous step that new row r extends.
  // On the first call parents must be all zeros.
  Array step(std::span<const TokenId> tokens, std::span<const std::size_t> parents);

  std::size_t steps() const { return steps_; }

 private:
  const ParameterStore& params_;
  const ModelConfig& config_;
  std::size_t source_len_ = 0;
  std::vector<Array> cross_keys_;
  std::vector<Array> cross_values_;
  std::vector<Array> self_keys_;
  std::vector<Array> self_values_;
  std::size_t rows_ = 1;
  std::size_t steps_ = 0;
};

RENEWNAT_NAMESPACE_END

#endif  // RENEWNAT_MODEL_TEACHER_HPP_
