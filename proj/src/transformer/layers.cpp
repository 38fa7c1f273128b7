// Copyright 2026 The renewnat Authors.
// SPDX-License-Identifier: Apache-2.0

#include "renewnat/transformer/layers.hpp"

#include <cmath>

RENEWNAT_NAMESPACE_BEGIN

PaddedTokens PaddedTokens::single(std::span<const TokenId> tokens) {
  PaddedTokens out;
  out.ids.assign(tokens.begin(), tokens.end());
  out.batch = 1;
  out.len = tokens.size();
  out.lengths = {tokens.size()};
  return out;
}

Array positional_encoding(std::size_t max_len, std::size_t d_model) {
  Array table(Shape{max_len, d_model});
  for (std::size_t pos = 0; pos < max_len; ++pos) {
    for (std::size_t i = 0; i < d_model; i += 2) {
      const double freq = std::pow(10000.0, -static_cast<double>(i) / static_cast<double>(d_model));
      const double angle = static_cast<double>(pos) * freq;
      table.at(pos, i) = static_cast<Scalar>(std::sin(angle));
      if (i + 1 < d_model) table.at(pos, i + 1) = static_cast<Scalar>(std::cos(angle));
    }
  }
  return table;
}

Var token_embedding(ForwardContext& ctx, std::span<const TokenId> ids) {
  const auto factor = static_cast<Scalar>(std::sqrt(static_cast<double>(ctx.config.d_model)));
  return embedding(ctx.tape, ctx.param("embed.tokens"), ids, factor);
}

Var add_positions(ForwardContext& ctx, Var x, std::size_t batch, std::size_t len,
                  std::size_t first_position) {
  if (first_position + len > ctx.config.max_len) {
    throw LengthError("sequence length " + std::to_string(first_position + len) +
                      " exceeds max_len " + std::to_string(ctx.config.max_len));
  }
  const std::size_t d = ctx.config.d_model;
  const Array table = positional_encoding(first_position + len, d);
  Array tiled(Shape{batch * len, d});
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t t = 0; t < len; ++t) {
      auto src = table.row(first_position + t);
      std::copy(src.begin(), src.end(), tiled.row(b * len + t).begin());
    }
  }
  return add(ctx.tape, x, ctx.tape.constant(std::move(tiled)));
}

Var embed(ForwardContext& ctx, const PaddedTokens& tokens) {
  if (tokens.len > ctx.config.max_len) {
    throw LengthError("sequence length " + std::to_string(tokens.len) + " exceeds max_len " +
                      std::to_string(ctx.config.max_len));
  }
  Var x = token_embedding(ctx, tokens.ids);
  if (tokens.ids.empty()) return x;
  return add_positions(ctx, x, tokens.batch, tokens.len);
}

Var project(ForwardContext& ctx, const std::string& prefix, Var x, bool with_bias) {
  return linear(ctx.tape, x, ctx.param(prefix + ".w"), with_bias ? ctx.param(prefix + ".b") : Var{});
}

Var norm(ForwardContext& ctx, const std::string& prefix, Var x) {
  return layer_norm(ctx.tape, x, ctx.param(prefix + ".g"), ctx.param(prefix + ".b"));
}

Var multi_head_attention(ForwardContext& ctx, const std::string& prefix, Var query_in,
                         Var kv_in, const AttentionLayout& layout) {
  Var q = project(ctx, prefix + ".q", query_in);
  Var k = project(ctx, prefix + ".k", kv_in);
  Var v = project(ctx, prefix + ".v", kv_in);
  Var context = attention(ctx.tape, q, k, v, layout);
  return project(ctx, prefix + ".o", context);
}

Var feed_forward(ForwardContext& ctx, const std::string& prefix, Var x) {
  Var hidden = relu(ctx.tape, project(ctx, prefix + ".w1", x));
  return project(ctx, prefix + ".w2", hidden);
}

Var maybe_dropout(ForwardContext& ctx, Var x) {
  if (!ctx.training()) return x;
  return dropout(ctx.tape, x, static_cast<Scalar>(ctx.config.dropout), *ctx.dropout_rng);
}

EncoderOutput encode(ForwardContext& ctx, const PaddedTokens& source) {
  if (source.len == 0 || source.batch == 0) throw LengthError("encode: empty source batch");
  Var x = embed(ctx, source);
  AttentionLayout self;
  self.batch = source.batch;
  self.query_len = source.len;
  self.key_len = source.len;
  self.heads = ctx.config.n_heads;
  self.key_lengths = source.lengths;

  for (std::size_t l = 0; l < ctx.config.enc_layers; ++l) {
    const std::string p = "enc." + std::to_string(l);
    Var h = norm(ctx, p + ".attn_ln", x);
    x = add(ctx.tape, x, maybe_dropout(ctx, multi_head_attention(ctx, p + ".attn", h, h, self)));
    h = norm(ctx, p + ".ffn_ln", x);
    x = add(ctx.tape, x, maybe_dropout(ctx, feed_forward(ctx, p + ".ffn", h)));
  }
  EncoderOutput out;
  out.states = norm(ctx, "enc.final_ln", x);
  out.batch = source.batch;
  out.len = source.len;
  out.lengths = source.lengths;
  return out;
}

std::string decoder_layer_prefix(std::size_t layer) { return "dec." + std::to_string(layer); }

Var decoder_stack(ForwardContext& ctx, Var inputs, const EncoderOutput& enc, LayerRange range,
                  SelfAttentionMode mode, std::span<const std::size_t> target_lengths,
                  std::size_t target_len) {
  if (range.begin >= range.end) throw ConfigError("decoder_stack: empty layer range");
  if (range.end > ctx.config.dec_layers) throw ConfigError("decoder_stack: range exceeds N");
  if (target_lengths.size() != enc.batch) throw ShapeError("decoder_stack: batch mismatch");

  AttentionLayout self;
  self.batch = enc.batch;
  self.query_len = target_len;
  self.key_len = target_len;
  self.heads = ctx.config.n_heads;
  self.key_lengths.assign(target_lengths.begin(), target_lengths.end());
  self.causal = mode == SelfAttentionMode::kCausal;

  AttentionLayout cross;
  cross.batch = enc.batch;
  cross.query_len = target_len;
  cross.key_len = enc.len;
  cross.heads = ctx.config.n_heads;
  cross.key_lengths = enc.lengths;

  Var x = inputs;
  for (std::size_t l = range.begin; l < range.end; ++l) {
    const std::string p = decoder_layer_prefix(l);
    Var h = norm(ctx, p + ".self_ln", x);
    x = add(ctx.tape, x, maybe_dropout(ctx, multi_head_attention(ctx, p + ".self_attn", h, h, self)));
    h = norm(ctx, p + ".cross_ln", x);
    x = add(ctx.tape, x,
            maybe_dropout(ctx, multi_head_attention(ctx, p + ".cross_attn", h, enc.states, cross)));
    h = norm(ctx, p + ".ffn_ln", x);
    x = add(ctx.tape, x, maybe_dropout(ctx, feed_forward(ctx, p + ".ffn", h)));
  }
  return x;
}

void init_linear(ParameterStore& store, const std::string& prefix, std::size_t in,
                 std::size_t out, Rng& rng, bool with_bias) {
  const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
  Array w(Shape{in, out});
  for (auto& x : w.data()) x = static_cast<Scalar>(rng.uniform(-limit, limit));
  store.add(prefix + ".w", std::move(w));
  if (with_bias) store.add(prefix + ".b", Array::zeros(Shape{out}));
}

void init_norm(ParameterStore& store, const std::string& prefix, std::size_t dim) {
  store.add(prefix + ".g", Array::filled(Shape{dim}, 1));
  store.add(prefix + ".b", Array::zeros(Shape{dim}));
}

namespace {

void init_attention(ParameterStore& store, const std::string& prefix, std::size_t d, Rng& rng) {
  for (const char* part : {".q", ".k", ".v", ".o"}) init_linear(store, prefix + part, d, d, rng);
}

void init_ffn(ParameterStore& store, const std::string& prefix, const ModelConfig& c, Rng& rng) {
  init_linear(store, prefix + ".w1", c.d_model, c.ffn_dim, rng);
  init_linear(store, prefix + ".w2", c.ffn_dim, c.d_model, rng);
}

}  // namespace

void init_embedding(ParameterStore& store, const ModelConfig& config, Rng& rng) {
  Array table(Shape{config.vocab_size, config.d_model});
  const double stddev = 1.0 / std::sqrt(static_cast<double>(config.d_model));
  for (auto& x : table.data()) x = static_cast<Scalar>(rng.normal() * stddev);
  store.add("embed.tokens", std::move(table));
}

void init_encoder(ParameterStore& store, const ModelConfig& config, Rng& rng) {
  const std::size_t d = config.d_model;
  for (std::size_t l = 0; l < config.enc_layers; ++l) {
    const std::string p = "enc." + std::to_string(l);
    init_norm(store, p + ".attn_ln", d);
    init_attention(store, p + ".attn", d, rng);
    init_norm(store, p + ".ffn_ln", d);
    init_ffn(store, p + ".ffn", config, rng);
  }
  init_norm(store, "enc.final_ln", d);
}

void init_decoder_layers(ParameterStore& store, const ModelConfig& config, Rng& rng) {
  const std::size_t d = config.d_model;
  for (std::size_t l = 0; l < config.dec_layers; ++l) {
    const std::string p = decoder_layer_prefix(l);
    init_norm(store, p + ".self_ln", d);
    init_attention(store, p + ".self_attn", d, rng);
    init_norm(store, p + ".cross_ln", d);
    init_attention(store, p + ".cross_attn", d, rng);
    init_norm(store, p + ".ffn_ln", d);
    init_ffn(store, p + ".ffn", config, rng);
  }
}

RENEWNAT_NAMESPACE_END
