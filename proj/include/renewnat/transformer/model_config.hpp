// Copyright 2026 The renewnat Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef RENEWNAT_TRANSFORMER_MODEL_CONFIG_HPP_
#define RENEWNAT_TRANSFORMER_MODEL_CONFIG_HPP_

#include <cstddef>
#include <string>
#include <string_view>

#include "renewnat/base.hpp"

RENEWNAT_NAMESPACE_BEGIN

enum class CopyMode { kUniform, kSoft };

// Which network a parameter store holds.
enum class ModelKind {
  kRenewNat,  // split decoder: N-K NAT layers + K MLM layers; K=0 is plain NAT
  kTeacher,   // autoregressive encoder-decoder used for distillation
};

std::string_view to_string(CopyMode mode);
CopyMode parse_copy_mode(std::string_view text);
std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view text);

struct ModelConfig {
  ModelKind kind = ModelKind::kRenewNat;
  std::size_t vocab_size = 0;
  std::size_t d_model = 64;
  std::size_t n_heads = 4;
  std::size_t ffn_dim = 128;
  std::size_t enc_layers = 2;
  // N: total decoder layers.
  std::size_t dec_layers = 4;
  // K: decoder layers given to the MLM sub-module (the top K of N).
  std::size_t mlm_layers = 2;
  std::size_t max_len = 128;
  double dropout = 0.1;
  // Tie the output projections to the embedding table.
  bool tie_output = false;
  CopyMode copy_mode = CopyMode::kUniform;
  double soft_copy_tau = 0.3;
  // C: length offsets are classified over [-C, +C].
  std::size_t length_offset_limit = 30;

  std::size_t nat_layers() const { return dec_layers - mlm_layers; }
  bool has_mlm() const { return kind == ModelKind::kRenewNat && mlm_layers > 0; }
  std::size_t length_classes() const { return 2 * length_offset_limit + 1; }

  // Throws ConfigError on an inconsistent configuration.
  void validate() const;
};

RENEWNAT_NAMESPACE_END

#endif  // RENEWNAT_TRANSFORMER_MODEL_CONFIG_HPP_
