// Copyright 2026 The renewnat Authors.
// SPDX-License-Identifier: Apache-2.0
//
// The split decoder. Layers [0, N-K) form the NAT sub-module, which reads a
// copy of the source embeddings and predicts a potential translation.
// Layers [N-K, N) form the MLM sub-module, which reads the embeddings of a
// partially masked target and predicts the masked tokens. Both attend to one
// shared encoder whose first position is the [LENGTH] token.

#ifndef RENEWNAT_MODEL_RENEWNAT_HPP_
#define RENEWNAT_MODEL_RENEWNAT_HPP_

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "renewnat/data/batch.hpp"
#include "renewnat/numerics/ops.hpp"
#include "renewnat/transformer/layers.hpp"

RENEWNAT_NAMESPACE_BEGIN

struct PotentialTranslation {
  std::vector<TokenId> tokens;
  // Max softmax probability per position, in (0, 1].
  std::vector<Scalar> confidence;
  // [T x V] log-probabilities, kept for candidate scoring.
  Array log_probs;

  std::size_t size() const { return tokens.size(); }
};

struct MaskedInput {
  std::vector<TokenId> tokens;
  std::vector<std::size_t> masked;    // ascending
  std::vector<std::size_t> observed;  // ascending

  std::size_t size() const { return tokens.size(); }
  // masked and observed partition [0, size()), and tokens[i] == [MASK] iff
  // i is masked.
  bool is_partition() const;
};

enum class MlmInputStrategy { kTarget, kOutput, kMixed };
std::string_view to_string(MlmInputStrategy strategy);
MlmInputStrategy parse_mlm_input_strategy(std::string_view text);

struct LossWeights {
  double pot = 1.0;
  double mlm = 1.0;
  double len = 1.0;
};

struct TrainConfig {
  double lr = 5e-4;
  std::uint64_t warmup_steps = 4000;
  double beta1 = 0.9;
  double beta2 = 0.98;
  double adam_eps = 1e-8;
  // Length of the glancing anneal; 0 means the run length.
  std::uint64_t total_steps = 0;
  std::size_t batch_tokens = 4096;
  MlmInputStrategy mlm_input = MlmInputStrategy::kMixed;
  double mix_probability = 0.5;
  bool glancing = false;
  double glancing_start = 0.5;
  double glancing_end = 0.3;
  double label_smoothing = 0.1;
  // Diagnostic only; the model objective uses unit weights.
  LossWeights loss_weights;

  void validate() const;
  // Linear anneal from glancing_start to glancing_end over total_steps.
  double glancing_ratio(std::uint64_t step) const;
};

struct LossBundle {
  double pot = 0;
  double mlm = 0;
  double len = 0;
  // pot + mlm + len (unweighted).
  double total = 0;
};

// --- parameters ---------------------------------------------------------------

void init_renewnat(ParameterStore& store, const ModelConfig& config, Rng& rng);

// --- copy_source --------------------------------------------------------------

// Row weights mapping T_X source rows to T decoder-input rows.
//   uniform: H[j] = src[floor(j * T_X / T)]
//   soft:    H[j] = sum_i softmax_i(-|j * T_X / T - i| / tau) * src[i]
RowMix copy_plan(std::size_t source_len, std::size_t target_len, CopyMode mode, double tau);

// Single sentence: `source_embeddings` is [T_X x d] (no [LENGTH] row).
Var copy_source(Tape& tape, Var source_embeddings, std::size_t target_len, CopyMode mode,
                double tau, std::size_t max_len);

// Batched decoder input H (without positions) built from the scaled token
// embeddings of `source` (whose row 0 is [LENGTH] and is skipped).
Var decoder_input_from_source(ForwardContext& ctx, const PaddedTokens& source,
                              std::span<const std::size_t> target_lengths,
                              std::size_t target_len);

// --- sub-module forwards --------------------------------------------------------

// NAT sub-module on H (positions are added here): [batch * T x V] logits.
Var nat_logits(ForwardContext& ctx, Var decoder_input, const EncoderOutput& enc,
               std::span<const std::size_t> target_lengths, std::size_t target_len);

// Potential translation of one sentence from its [T x V] logits.
PotentialTranslation potential_from_logits(const Array& logits);

// MLM sub-module on the token grid Y': [batch * T x V] logits.
Var mlm_logits(ForwardContext& ctx, const PaddedTokens& masked_targets, const EncoderOutput& enc);

// Length classifier over the [LENGTH] states: [batch x (2C + 1)] logits.
Var length_logits(ForwardContext& ctx, const EncoderOutput& enc);

// Offset class of T_Y - T_X, clamped to [-C, C] and shifted by C.
std::size_t length_class(std::size_t source_len, std::size_t target_len, std::size_t limit);

// --- masking -----------------------------------------------------------------

// n ~ Uniform{1..T}, then n positions uniformly without replacement. Masked
// positions hold [MASK]; observed positions hold the reference.
MaskedInput uniform_mask(std::span<const TokenId> reference, Rng& rng);

// Fills observed positions of `mask` from the reference (target), the
// potential translation (output), or a per-position Bernoulli(p_mix) choice of
// potential-else-reference (mixed). Throws ShapeError if the potential
// translation is missing or its length differs under output/mixed.
MaskedInput build_mlm_input(std::span<const TokenId> reference,
                            std::optional<std::span<const TokenId>> potential,
                            MlmInputStrategy strategy, double mix_probability, Rng& rng,
                            const MaskedInput& mask);

// Mean NLL of the reference over masked positions only; observed-position
// logits get exactly zero gradient. Throws DegenerateBatchError when nothing
// is masked.
Var mlm_loss(Tape& tape, Var logits, std::span<const TokenId> reference,
             std::span<const std::size_t> masked_positions);

// --- glancing ------------------------------------------------------------------

// |G| = round(ratio * Hamming(Y_pot, Y)) positions sampled uniformly among all
// T positions. Empty when Y_pot == Y.
std::vector<std::size_t> glancing_positions(std::span<const TokenId> reference,
                                            std::span<const TokenId> potential, double ratio,
                                            Rng& rng);

struct GlancedInput {
  Var input;
  std::vector<std::size_t> positions;
};

// H'[i] = emb(Y)[i] for i in G, else H[i]. When G is empty H' is H itself.
GlancedInput glancing_sample(ForwardContext& ctx, Var decoder_input,
                             std::span<const TokenId> reference,
                             std::span<const TokenId> potential, double ratio, Rng& rng);

// --- objective -----------------------------------------------------------------

Var length_loss(ForwardContext& ctx, const EncoderOutput& enc,
                std::span<const std::size_t> source_lengths,
                std::span<const std::size_t> target_lengths);

struct LossGraph {
  Var pot;  // invalid when every position was glanced
  Var mlm;  // invalid for K = 0 or when the MLM weight is zero
  Var len;
  Var total;  // weighted sum used for backward
  LossBundle values;
};

// Builds L_pot + L_mlm + L_len for a batch (Algorithm: encode, copy, NAT
// forward with optional glancing, mask, MLM forward, length loss).
LossGraph build_losses(ForwardContext& ctx, const Batch& batch, const TrainConfig& config,
                       Rng& rng, double glancing_ratio);

// Joint training with one backward pass over the summed loss and one Adam
// update per step.
class Trainer {
 public:
  Trainer(const ModelConfig& model, const TrainConfig& train, ParameterStore& params,
          std::uint64_t seed);

  // Throws NonFiniteError (parameters untouched) on a non-finite loss and
  // DegenerateBatchError if the batch has no trainable positions.
  LossBundle train_step(const Batch& batch);

  std::uint64_t step() const { return params_.step(); }
  double current_lr() const;

 private:
  ModelConfig model_;
  TrainConfig train_;
  ParameterStore& params_;
  Rng rng_;
};

RENEWNAT_NAMESPACE_END

#endif  // RENEWNAT_MODEL_RENEWNAT_HPP_
