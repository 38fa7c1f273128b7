// Copyright 2026 The renewnat Authors.
// SPDX-License-Identifier: Apache-2.0

#include "renewnat/model/teacher.hpp"

#include <algorithm>

RENEWNAT_NAMESPACE_BEGIN

void init_teacher(ParameterStore& store, const ModelConfig& config, Rng& rng) {
  config.validate();
  if (config.kind != ModelKind::kTeacher) throw ConfigError("init_teacher: wrong model kind");
  init_embedding(store, config, rng);
  init_encoder(store, config, rng);
  init_decoder_layers(store, config, rng);
  init_norm(store, "dec.final_ln", config.d_model);
  if (!config.tie_output) init_linear(store, "ar.out", config.d_model, config.vocab_size, rng, false);
}

namespace {

Var output_logits(ForwardContext& ctx, Var x) {
  x = norm(ctx, "dec.final_ln", x);
  if (ctx.config.tie_output) return matmul(ctx.tape, x, ctx.param("embed.tokens"), true);
  return linear(ctx.tape, x, ctx.param("ar.out.w"), Var{});
}

PaddedTokens shifted_grid(const PaddedTokens& target, bool with_bos) {
  PaddedTokens grid;
  grid.batch = target.batch;
  grid.len = target.len + 1;
  grid.ids.assign(grid.batch * grid.len, kPadId);
  for (std::size_t b = 0; b < target.batch; ++b) {
    auto seq = target.sequence(b);
    TokenId* row = grid.ids.data() + b * grid.len;
    if (with_bos) {
      row[0] = kBosId;
      std::copy(seq.begin(), seq.end(), row + 1);
    } else {
      std::copy(seq.begin(), seq.end(), row);
      row[seq.size()] = kEosId;
    }
    grid.lengths.push_back(seq.size() + 1);
  }
  return grid;
}

}  // namespace

Var teacher_logits(ForwardContext& ctx, const EncoderOutput& enc, const PaddedTokens& inputs) {
  Var x = embed(ctx, inputs);
  x = decoder_stack(ctx, x, enc, LayerRange{0, ctx.config.dec_layers}, SelfAttentionMode::kCausal,
                    inputs.lengths, inputs.len);
  return output_logits(ctx, x);
}

Var teacher_loss(ForwardContext& ctx, const Batch& batch, double label_smoothing) {
  const PaddedTokens inputs = shifted_grid(batch.target, true);
  const PaddedTokens outputs = shifted_grid(batch.target, false);
  std::vector<std::uint8_t> include(outputs.ids.size(), 0);
  for (std::size_t b = 0; b < outputs.batch; ++b) {
    std::fill_n(include.begin() + static_cast<std::ptrdiff_t>(b * outputs.len), outputs.lengths[b], 1);
  }
  EncoderOutput enc = encode(ctx, batch.source);
  Var logits = teacher_logits(ctx, enc, inputs);
  return cross_entropy(ctx.tape, logits, outputs.ids, include, static_cast<Scalar>(label_smoothing));
}

double teacher_sequence_log_prob(const ParameterStore& params, const ModelConfig& config,
                                 std::span<const TokenId> source,
                                 std::span<const TokenId> target) {
  Tape tape(false);
  ForwardContext ctx{tape, params, config};
  std::vector<TokenId> src{kLengthId};
  src.insert(src.end(), source.begin(), source.end());
  EncoderOutput enc = encode(ctx, PaddedTokens::single(src));
  const PaddedTokens tgt = PaddedTokens::single(target);
  const PaddedTokens inputs = shifted_grid(tgt, true);
  const PaddedTokens outputs = shifted_grid(tgt, false);
  const Array log_probs = log_softmax_rows(tape.value(teacher_logits(ctx, enc, inputs)));
  double total = 0;
  for (std::size_t t = 0; t < outputs.len; ++t) {
    total += log_probs.at(t, static_cast<std::size_t>(outputs.ids[t]));
  }
  return total;
}

TeacherDecoderState::TeacherDecoderState(const ParameterStore& params, const ModelConfig& config,
                                         std::span<const TokenId> source)
    : params_(params), config_(config) {
  if (config.kind != ModelKind::kTeacher) throw ConfigError("TeacherDecoderState: not a teacher");
  Tape tape(false);
  ForwardContext ctx{tape, params_, config_};
  std::vector<TokenId> src{kLengthId};
  src.insert(src.end(), source.begin(), source.end());
  EncoderOutput enc = encode(ctx, PaddedTokens::single(src));
  source_len_ = src.size();
  for (std::size_t l = 0; l < config.dec_layers; ++l) {
    const std::string p = decoder_layer_prefix(l) + ".cross_attn";
    cross_keys_.push_back(tape.value(project(ctx, p + ".k", enc.states)));
    cross_values_.push_back(tape.value(project(ctx, p + ".v", enc.states)));
  }
  self_keys_.resize(config.dec_layers);
  self_values_.resize(config.dec_layers);
}

namespace {

Array extend_cache(const Array& cache, const Array& fresh, std::span<const std::size_t> parents,
                   std::size_t steps) {
  const std::size_t rows = parents.size();
  const std::size_t d = fresh.cols();
  Array out(Shape{rows * (steps + 1), d});
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t t = 0; t < steps; ++t) {
      auto src = cache.row(parents[r] * steps + t);
      std::copy(src.begin(), src.end(), out.row(r * (steps + 1) + t).begin());
    }
    auto src = fresh.row(r);
    std::copy(src.begin(), src.end(), out.row(r * (steps + 1) + steps).begin());
  }
  return out;
}

Array tile_rows(const Array& block, std::size_t copies) {
  Array out(Shape{block.rows() * copies, block.cols()});
  auto dst = out.data().begin();
  for (std::size_t c = 0; c < copies; ++c) dst = std::copy(block.data().begin(), block.data().end(), dst);
  return out;
}

}  // namespace

Array TeacherDecoderState::step(std::span<const TokenId> tokens,
                                std::span<const std::size_t> parents) {
  const std::size_t rows = tokens.size();
  if (rows == 0 || parents.size() != rows) throw ShapeError("TeacherDecoderState::step: bad rows");
  for (std::size_t p : parents) {
    if (p >= rows_) throw ShapeError("TeacherDecoderState::step: parent out of range");
  }
  Tape tape(false);
  ForwardContext ctx{tape, params_, config_};
  Var x = token_embedding(ctx, tokens);
  x = add_positions(ctx, x, rows, 1, steps_);

  AttentionLayout self{rows, 1, steps_ + 1, config_.n_heads,
                       std::vector<std::size_t>(rows, steps_ + 1), false};
  AttentionLayout cross{rows, 1, source_len_, config_.n_heads,
                        std::vector<std::size_t>(rows, source_len_), false};

  for (std::size_t l = 0; l < config_.dec_layers; ++l) {
    const std::string p = decoder_layer_prefix(l);
    Var h = norm(ctx, p + ".self_ln", x);
    Var q = project(ctx, p + ".self_attn.q", h);
    self_keys_[l] = extend_cache(self_keys_[l], tape.value(project(ctx, p + ".self_attn.k", h)),
                                 parents, steps_);
    self_values_[l] = extend_cache(self_values_[l], tape.value(project(ctx, p + ".self_attn.v", h)),
                                   parents, steps_);
    Var attended = attention(tape, q, tape.constant(self_keys_[l]), tape.constant(self_values_[l]), self);
    x = add(tape, x, project(ctx, p + ".self_attn.o", attended));

    h = norm(ctx, p + ".cross_ln", x);
    q = project(ctx, p + ".cross_attn.q", h);
    attended = attention(tape, q, tape.constant(tile_rows(cross_keys_[l], rows)),
                         tape.constant(tile_rows(cross_values_[l], rows)), cross);
    x = add(tape, x, project(ctx, p + ".cross_attn.o", attended));

    h = norm(ctx, p + ".ffn_ln", x);
    x = add(tape, x, feed_forward(ctx, p + ".ffn", h));
  }
  rows_ = rows;
  ++steps_;
  return log_softmax_rows(tape.value(output_logits(ctx, x)));
}

RENEWNAT_NAMESPACE_END
