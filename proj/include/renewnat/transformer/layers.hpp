// Copyright 2026 The renewnat Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Transformer building blocks shared by the RenewNAT model and the
// autoregressive teacher. All blocks are pre-norm:
//   x = x + Dropout(Sublayer(LayerNorm(x)))

#ifndef RENEWNAT_TRANSFORMER_LAYERS_HPP_
#define RENEWNAT_TRANSFORMER_LAYERS_HPP_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "renewnat/numerics/ops.hpp"
#include "renewnat/numerics/parameter_store.hpp"
#include "renewnat/numerics/rng.hpp"
#include "renewnat/numerics/tape.hpp"
#include "renewnat/transformer/model_config.hpp"

RENEWNAT_NAMESPACE_BEGIN

// A batch of right-padded token sequences; ids[b * len + t].
struct PaddedTokens {
  std::vector<TokenId> ids;
  std::size_t batch = 0;
  std::size_t len = 0;
  std::vector<std::size_t> lengths;

  static PaddedTokens single(std::span<const TokenId> tokens);
  std::span<const TokenId> sequence(std::size_t b) const {
    return std::span<const TokenId>(ids).subspan(b * len, lengths[b]);
  }
};

// Everything a forward pass reads. A null dropout_rng means inference mode.
struct ForwardContext {
  Tape& tape;
  const ParameterStore& params;
  const ModelConfig& config;
  Rng* dropout_rng = nullptr;

  Var param(std::string_view name) const { return tape.parameter(params.at(name)); }
  bool training() const { return dropout_rng != nullptr; }
};

struct EncoderOutput {
  // [batch * len x d_model]; row b * len is the [LENGTH] token's state.
  Var states;
  std::size_t batch = 0;
  std::size_t len = 0;
  // Per-item lengths including the [LENGTH] token.
  std::vector<std::size_t> lengths;
};

// Half-open range [begin, end) of decoder layer indices.
struct LayerRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const { return end - begin; }
};

enum class SelfAttentionMode { kFull, kCausal };

// Sinusoidal table [max_len x d_model]: row p = [sin(p w_0), cos(p w_0), ...].
Array positional_encoding(std::size_t max_len, std::size_t d_model);

// Token embedding scaled by sqrt(d_model), without positions.
Var token_embedding(ForwardContext& ctx, std::span<const TokenId> ids);

// Adds positional encodings for a [batch * len x d] activation.
Var add_positions(ForwardContext& ctx, Var x, std::size_t batch, std::size_t len,
                  std::size_t first_position = 0);

// token_embedding + positions. Throws LengthError when len > max_len.
Var embed(ForwardContext& ctx, const PaddedTokens& tokens);

Var project(ForwardContext& ctx, const std::string& prefix, Var x, bool with_bias = true);
Var norm(ForwardContext& ctx, const std::string& prefix, Var x);

// Projects queries from `query_in` and keys/values from `kv_in`, attends, and
// applies the output projection.
Var multi_head_attention(ForwardContext& ctx, const std::string& prefix, Var query_in,
                         Var kv_in, const AttentionLayout& layout);

Var feed_forward(ForwardContext& ctx, const std::string& prefix, Var x);

// Applies sublayer dropout in training mode.
Var maybe_dropout(ForwardContext& ctx, Var x);

// Runs the encoder stack over sources that already start with [LENGTH].
EncoderOutput encode(ForwardContext& ctx, const PaddedTokens& source);

// Runs decoder layers [range.begin, range.end) on `inputs`
// ([batch * target_len x d]), attending to `enc`. Throws ConfigError for an
// empty range.
Var decoder_stack(ForwardContext& ctx, Var inputs, const EncoderOutput& enc, LayerRange range,
                  SelfAttentionMode mode, std::span<const std::size_t> target_lengths,
                  std::size_t target_len);

std::string decoder_layer_prefix(std::size_t layer);

// Parameter initialisation. Weights are Xavier-uniform, biases zero, layer
// norms identity, embeddings N(0, d^-1/2).
void init_linear(ParameterStore& store, const std::string& prefix, std::size_t in,
                 std::size_t out, Rng& rng, bool with_bias = true);
void init_norm(ParameterStore& store, const std::string& prefix, std::size_t dim);
void init_embedding(ParameterStore& store, const ModelConfig& config, Rng& rng);
void init_encoder(ParameterStore& store, const ModelConfig& config, Rng& rng);
void init_decoder_layers(ParameterStore& store, const ModelConfig& config, Rng& rng);

RENEWNAT_NAMESPACE_END

#endif  // RENEWNAT_TRANSFORMER_LAYERS_HPP_
