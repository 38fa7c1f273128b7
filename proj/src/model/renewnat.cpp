// Copyright 2026 The renewnat Authors.
// SPDX-License-Identifier: Apache-2.0

#include "renewnat/model/renewnat.hpp"

#include <algorithm>
#include <cmath>

#include "renewnat/model/teacher.hpp"

RENEWNAT_NAMESPACE_BEGIN

bool MaskedInput::is_partition() const {
  std::vector<int> seen(tokens.size(), 0);
  for (std::size_t i : masked) {
    if (i >= tokens.size() || seen[i]++ || tokens[i] != kMaskId) return false;
  }
  for (std::size_t i : observed) {
    if (i >= tokens.size() || seen[i]++ || tokens[i] == kMaskId) return false;
  }
  return std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; });
}

std::string_view to_string(MlmInputStrategy strategy) {
  switch (strategy) {
    case MlmInputStrategy::kTarget: return "target";
    case MlmInputStrategy::kOutput: return "output";
    case MlmInputStrategy::kMixed: return "mixed";
  }
  return "mixed";
}

MlmInputStrategy parse_mlm_input_strategy(std::string_view text) {
  if (text == "target") return MlmInputStrategy::kTarget;
  if (text == "output") return MlmInputStrategy::kOutput;
  if (text == "mixed") return MlmInputStrategy::kMixed;
  throw ConfigError("unknown MLM input strategy: " + std::string(text));
}

void TrainConfig::validate() const {
  if (lr <= 0) throw ConfigError("lr must be positive");
  if (mix_probability < 0 || mix_probability > 1) throw ConfigError("mix_probability must be in [0,1]");
  if (glancing_start <= 0 || glancing_start >= 1 || glancing_end <= 0 || glancing_end >= 1) {
    throw ConfigError("glancing ratios must be in (0,1)");
  }
  if (label_smoothing < 0 || label_smoothing >= 1) throw ConfigError("label_smoothing must be in [0,1)");
  if (batch_tokens == 0) throw ConfigError("batch_tokens must be positive");
  if (beta1 < 0 || beta1 >= 1 || beta2 < 0 || beta2 >= 1) throw ConfigError("Adam betas must be in [0,1)");
}

double TrainConfig::glancing_ratio(std::uint64_t step) const {
  if (total_steps == 0) return glancing_end;
  const double progress =
      std::min(1.0, static_cast<double>(step) / static_cast<double>(total_steps));
  return glancing_start + (glancing_end - glancing_start) * progress;
}

void init_renewnat(ParameterStore& store, const ModelConfig& config, Rng& rng) {
  config.validate();
  if (config.kind != ModelKind::kRenewNat) throw ConfigError("init_renewnat: wrong model kind");
  init_embedding(store, config, rng);
  init_encoder(store, config, rng);
  init_decoder_layers(store, config, rng);
  init_norm(store, "nat.final_ln", config.d_model);
  if (!config.tie_output) init_linear(store, "nat.out", config.d_model, config.vocab_size, rng, false);
  if (config.has_mlm()) {
    init_norm(store, "mlm.final_ln", config.d_model);
    if (!config.tie_output) init_linear(store, "mlm.out", config.d_model, config.vocab_size, rng, false);
  }
  init_linear(store, "length.out", config.d_model, config.length_classes(), rng);
}

RowMix copy_plan(std::size_t source_len, std::size_t target_len, CopyMode mode, double tau) {
  if (source_len == 0 || target_len == 0) throw LengthError("copy_plan: empty sequence");
  RowMix plan(target_len);
  for (std::size_t j = 0; j < target_len; ++j) {
    if (mode == CopyMode::kUniform) {
      plan[j].emplace_back(j * source_len / target_len, Scalar(1));
      continue;
    }
    const double center = static_cast<double>(j) * static_cast<double>(source_len) /
                          static_cast<double>(target_len);
    std::vector<double> logits(source_len);
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < source_len; ++i) {
      logits[i] = -std::abs(center - static_cast<double>(i)) / tau;
      peak = std::max(peak, logits[i]);
    }
    double total = 0;
    for (auto& l : logits) total += (l = std::exp(l - peak));
    for (std::size_t i = 0; i < source_len; ++i) {
      plan[j].emplace_back(i, static_cast<Scalar>(logits[i] / total));
    }
  }
  return plan;
}

Var copy_source(Tape& tape, Var source_embeddings, std::size_t target_len, CopyMode mode,
                double tau, std::size_t max_len) {
  if (target_len > max_len) {
    throw LengthError("copy_source: target length " + std::to_string(target_len) +
                      " exceeds max_len " + std::to_string(max_len));
  }
  const std::size_t source_len = tape.value(source_embeddings).rows();
  return mix_rows(tape, source_embeddings, copy_plan(source_len, target_len, mode, tau));
}

Var decoder_input_from_source(ForwardContext& ctx, const PaddedTokens& source,
                              std::span<const std::size_t> target_lengths,
                              std::size_t target_len) {
  if (target_len > ctx.config.max_len) {
    throw LengthError("target length " + std::to_string(target_len) + " exceeds max_len " +
                      std::to_string(ctx.config.max_len));
  }
  Var embedded = token_embedding(ctx, source.ids);
  RowMix mix(source.batch * target_len);
  for (std::size_t b = 0; b < source.batch; ++b) {
    const std::size_t base = b * source.len + 1;  // skip [LENGTH]
    const std::size_t source_len = source.lengths[b] - 1;
    const std::size_t tl = target_lengths[b];
    const RowMix plan = copy_plan(source_len, tl, ctx.config.copy_mode, ctx.config.soft_copy_tau);
    for (std::size_t j = 0; j < target_len; ++j) {
      auto& row = mix[b * target_len + j];
      if (j < tl) {
        for (const auto& [i, w] : plan[j]) row.emplace_back(base + i, w);
      } else {
        row.emplace_back(base, Scalar(1));  // padding row, never read
      }
    }
  }
  return mix_rows(ctx.tape, embedded, mix);
}

namespace {

Var output_projection(ForwardContext& ctx, const std::string& head, Var x) {
  if (ctx.config.tie_output) return matmul(ctx.tape, x, ctx.param("embed.tokens"), true);
  return linear(ctx.tape, x, ctx.param(head + ".out.w"), Var{});
}

}  // namespace

Var nat_logits(ForwardContext& ctx, Var decoder_input, const EncoderOutput& enc,
               std::span<const std::size_t> target_lengths, std::size_t target_len) {
  Var x = add_positions(ctx, decoder_input, enc.batch, target_len);
  x = decoder_stack(ctx, x, enc, LayerRange{0, ctx.config.nat_layers()}, SelfAttentionMode::kFull,
                    target_lengths, target_len);
  x = norm(ctx, "nat.final_ln", x);
  return output_projection(ctx, "nat", x);
}

PotentialTranslation potential_from_logits(const Array& logits) {
  PotentialTranslation pot;
  pot.log_probs = log_softmax_rows(logits);
  const auto best = argmax_rows(pot.log_probs);
  pot.tokens.reserve(best.size());
  pot.confidence.reserve(best.size());
  for (std::size_t i = 0; i < best.size(); ++i) {
    pot.tokens.push_back(static_cast<TokenId>(best[i]));
    pot.confidence.push_back(std::exp(pot.log_probs.at(i, best[i])));
  }
  return pot;
}

Var mlm_logits(ForwardContext& ctx, const PaddedTokens& masked_targets, const EncoderOutput& enc) {
  if (!ctx.config.has_mlm()) throw ConfigError("mlm_logits: model has no MLM sub-module");
  Var x = embed(ctx, masked_targets);
  x = decoder_stack(ctx, x, enc, LayerRange{ctx.config.nat_layers(), ctx.config.dec_layers},
                    SelfAttentionMode::kFull, masked_targets.lengths, masked_targets.len);
  x = norm(ctx, "mlm.final_ln", x);
  return output_projection(ctx, "mlm", x);
}

Var length_logits(ForwardContext& ctx, const EncoderOutput& enc) {
  RowMix pick(enc.batch);
  for (std::size_t b = 0; b < enc.batch; ++b) pick[b].emplace_back(b * enc.len, Scalar(1));
  Var states = mix_rows(ctx.tape, enc.states, pick);
  return project(ctx, "length.out", states);
}

std::size_t length_class(std::size_t source_len, std::size_t target_len, std::size_t limit) {
  const auto c = static_cast<long long>(limit);
  const long long offset = std::clamp(
      static_cast<long long>(target_len) - static_cast<long long>(source_len), -c, c);
  return static_cast<std::size_t>(offset + c);
}

MaskedInput uniform_mask(std::span<const TokenId> reference, Rng& rng) {
  const std::size_t n = reference.size();
  if (n == 0) throw LengthError("uniform_mask: empty reference");
  const std::size_t count = 1 + rng.below(n);
  auto masked = rng.sample_without_replacement(n, count);
  std::sort(masked.begin(), masked.end());

  MaskedInput out;
  out.tokens.assign(reference.begin(), reference.end());
  out.masked = std::move(masked);
  std::size_t next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (next < out.masked.size() && out.masked[next] == i) {
      out.tokens[i] = kMaskId;
      ++next;
    } else {
      out.observed.push_back(i);
    }
  }
  return out;
}

MaskedInput build_mlm_input(std::span<const TokenId> reference,
                            std::optional<std::span<const TokenId>> potential,
                            MlmInputStrategy strategy, double mix_probability, Rng& rng,
                            const MaskedInput& mask) {
  if (mask.size() != reference.size()) throw ShapeError("build_mlm_input: mask length mismatch");
  if (strategy != MlmInputStrategy::kTarget) {
    if (!potential) throw ShapeError("build_mlm_input: strategy needs the potential translation");
    if (potential->size() != reference.size()) {
      throw ShapeError("build_mlm_input: potential/reference length mismatch");
    }
  }
  MaskedInput out = mask;
  for (std::size_t i : out.masked) out.tokens[i] = kMaskId;
  for (std::size_t i : out.observed) {
    switch (strategy) {
      case MlmInputStrategy::kTarget:
        out.tokens[i] = reference[i];
        break;
      case MlmInputStrategy::kOutput:
        out.tokens[i] = (*potential)[i];
        break;
      case MlmInputStrategy::kMixed:
        out.tokens[i] = rng.bernoulli(mix_probability) ? (*potential)[i] : reference[i];
        break;
    }
  }
  return out;
}

Var mlm_loss(Tape& tape, Var logits, std::span<const TokenId> reference,
             std::span<const std::size_t> masked_positions) {
  if (masked_positions.empty()) throw DegenerateBatchError("mlm_loss: no masked positions");
  std::vector<std::uint8_t> include(reference.size(), 0);
  for (std::size_t i : masked_positions) include.at(i) = 1;
  return cross_entropy(tape, logits, reference, include, 0);
}

std::vector<std::size_t> glancing_positions(std::span<const TokenId> reference,
                                            std::span<const TokenId> potential, double ratio,
                                            Rng& rng) {
  if (reference.size() != potential.size()) throw ShapeError("glancing: length mismatch");
  std::size_t distance = 0;
  for (std::size_t i = 0; i < reference.size(); ++i) distance += reference[i] != potential[i];
  if (distance == 0) return {};
  const auto count = std::min<std::size_t>(
      reference.size(), static_cast<std::size_t>(std::lround(ratio * static_cast<double>(distance))));
  auto picked = rng.sample_without_replacement(reference.size(), count);
  std::sort(picked.begin(), picked.end());
  return picked;
}

GlancedInput glancing_sample(ForwardContext& ctx, Var decoder_input,
                             std::span<const TokenId> reference,
                             std::span<const TokenId> potential, double ratio, Rng& rng) {
  GlancedInput out{decoder_input, glancing_positions(reference, potential, ratio, rng)};
  if (out.positions.empty()) return out;
  std::vector<std::uint8_t> take(reference.size(), 0);
  for (std::size_t i : out.positions) take[i] = 1;
  out.input = select_rows(ctx.tape, decoder_input, token_embedding(ctx, reference), take);
  return out;
}

Var length_loss(ForwardContext& ctx, const EncoderOutput& enc,
                std::span<const std::size_t> source_lengths,
                std::span<const std::size_t> target_lengths) {
  std::vector<TokenId> classes(enc.batch);
  for (std::size_t b = 0; b < enc.batch; ++b) {
    classes[b] = static_cast<TokenId>(
        length_class(source_lengths[b], target_lengths[b], ctx.config.length_offset_limit));
  }
  const std::vector<std::uint8_t> include(enc.batch, 1);
  return cross_entropy(ctx.tape, length_logits(ctx, enc), classes, include, 0);
}

namespace {

std::vector<TokenId> rows_argmax(const Array& logits, std::size_t b, std::size_t stride,
                                 std::size_t len) {
  std::vector<TokenId> out(len);
  for (std::size_t t = 0; t < len; ++t) {
    auto row = logits.row(b * stride + t);
    out[t] = static_cast<TokenId>(std::max_element(row.begin(), row.end()) - row.begin());
  }
  return out;
}

Var weighted(Tape& tape, Var loss, double weight) {
  return weight == 1.0 ? loss : scale(tape, loss, static_cast<Scalar>(weight));
}

LossGraph build_renewnat_losses(ForwardContext& ctx, const Batch& batch, const TrainConfig& config,
                                Rng& rng, double glancing_ratio) {
  const ModelConfig& mc = ctx.config;
  const std::size_t batch_size = batch.size();
  const std::size_t tlen = batch.target.len;
  const auto& tlens = batch.target.lengths;
  std::vector<std::size_t> slens(batch_size);
  for (std::size_t b = 0; b < batch_size; ++b) slens[b] = batch.source_length(b);

  EncoderOutput enc = encode(ctx, batch.source);
  Var h = decoder_input_from_source(ctx, batch.source, tlens, tlen);
  Var logits = nat_logits(ctx, h, enc, tlens, tlen);

  // Potential translation, detached from the tape.
  std::vector<std::vector<TokenId>> potential(batch_size);
  for (std::size_t b = 0; b < batch_size; ++b) {
    potential[b] = rows_argmax(ctx.tape.value(logits), b, tlen, tlens[b]);
  }

  std::vector<std::uint8_t> include(batch.target_pad.size());
  for (std::size_t i = 0; i < include.size(); ++i) include[i] = !batch.target_pad[i];

  if (config.glancing && glancing_ratio > 0) {
    std::vector<std::uint8_t> glanced(include.size(), 0);
    bool any = false;
    for (std::size_t b = 0; b < batch_size; ++b) {
      for (std::size_t i : glancing_positions(batch.target.sequence(b), potential[b],
                                              glancing_ratio, rng)) {
        glanced[b * tlen + i] = 1;
        include[b * tlen + i] = 0;
        any = true;
      }
    }
    if (any) {
      Var glanced_input = select_rows(ctx.tape, h, token_embedding(ctx, batch.target.ids), glanced);
      logits = nat_logits(ctx, glanced_input, enc, tlens, tlen);
    }
  }

  LossGraph graph;
  const bool any_pot = std::any_of(include.begin(), include.end(), [](auto v) { return v != 0; });
  if (any_pot) {
    graph.pot = cross_entropy(ctx.tape, logits, batch.target.ids, include,
                              static_cast<Scalar>(config.label_smoothing));
    graph.values.pot = static_cast<double>(ctx.tape.value(graph.pot).item());
  }

  if (mc.has_mlm()) {
    PaddedTokens masked_grid;
    masked_grid.batch = batch_size;
    masked_grid.len = tlen;
    masked_grid.lengths = tlens;
    masked_grid.ids.assign(batch_size * tlen, kPadId);
    std::vector<std::uint8_t> masked_flags(batch_size * tlen, 0);
    for (std::size_t b = 0; b < batch_size; ++b) {
      auto reference = batch.target.sequence(b);
      const MaskedInput mask = uniform_mask(reference, rng);
      const MaskedInput input =
          build_mlm_input(reference, std::span<const TokenId>(potential[b]), config.mlm_input,
                          config.mix_probability, rng, mask);
      std::copy(input.tokens.begin(), input.tokens.end(),
                masked_grid.ids.begin() + static_cast<std::ptrdiff_t>(b * tlen));
      for (std::size_t i : input.masked) masked_flags[b * tlen + i] = 1;
    }
    Var mlm = mlm_logits(ctx, masked_grid, enc);
    graph.mlm = cross_entropy(ctx.tape, mlm, batch.target.ids, masked_flags, 0);
    graph.values.mlm = static_cast<double>(ctx.tape.value(graph.mlm).item());
  }

  graph.len = length_loss(ctx, enc, slens, tlens);
  graph.values.len = static_cast<double>(ctx.tape.value(graph.len).item());

  const LossWeights& w = config.loss_weights;
  Var total = weighted(ctx.tape, graph.len, w.len);
  if (graph.pot.valid()) total = add(ctx.tape, weighted(ctx.tape, graph.pot, w.pot), total);
  if (graph.mlm.valid()) total = add(ctx.tape, weighted(ctx.tape, graph.mlm, w.mlm), total);
  graph.total = total;
  graph.values.total = graph.values.pot + graph.values.mlm + graph.values.len;
  return graph;
}

}  // namespace

LossGraph build_losses(ForwardContext& ctx, const Batch& batch, const TrainConfig& config,
                       Rng& rng, double glancing_ratio) {
  if (ctx.config.kind == ModelKind::kTeacher) {
    LossGraph graph;
    graph.pot = teacher_loss(ctx, batch, config.label_smoothing);
    graph.total = graph.pot;
    graph.values.pot = static_cast<double>(ctx.tape.value(graph.pot).item());
    graph.values.total = graph.values.pot;
    return graph;
  }
  return build_renewnat_losses(ctx, batch, config, rng, glancing_ratio);
}

Trainer::Trainer(const ModelConfig& model, const TrainConfig& train, ParameterStore& params,
                 std::uint64_t seed)
    : model_(model), train_(train), params_(params), rng_(seed) {
  model_.validate();
  train_.validate();
}

double Trainer::current_lr() const {
  return inverse_sqrt_lr(train_.lr, train_.warmup_steps, params_.step() + 1);
}

LossBundle Trainer::train_step(const Batch& batch) {
  Tape tape;
  ForwardContext ctx{tape, params_, model_, &rng_};
  const double ratio = train_.glancing ? train_.glancing_ratio(params_.step()) : 0.0;
  LossGraph graph = build_losses(ctx, batch, train_, rng_, ratio);

  const LossBundle& v = graph.values;
  const Scalar total = tape.value(graph.total).item();
  if (!std::isfinite(v.pot) || !std::isfinite(v.mlm) || !std::isfinite(v.len) ||
      !std::isfinite(static_cast<double>(total))) {
    throw NonFiniteError("train_step " + std::to_string(params_.step()) +
                         ": non-finite loss (pot=" + std::to_string(v.pot) +
                         ", mlm=" + std::to_string(v.mlm) + ", len=" + std::to_string(v.len) +
                         "); parameters not updated");
  }
  tape.backward(graph.total);
  tape.accumulate_gradients(params_);
  AdamConfig adam{current_lr(), train_.beta1, train_.beta2, train_.adam_eps};
  adam_step(params_, adam);
  return v;
}

RENEWNAT_NAMESPACE_END
