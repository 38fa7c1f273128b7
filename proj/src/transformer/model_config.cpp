// Copyright 2026 The renewnat Authors.
// SPDX-License-Identifier: Apache-2.0

#include "renewnat/transformer/model_config.hpp"

RENEWNAT_NAMESPACE_BEGIN

std::string_view to_string(CopyMode mode) {
  return mode == CopyMode::kSoft ? "soft" : "uniform";
}

CopyMode parse_copy_mode(std::string_view text) {
  if (text == "uniform") return CopyMode::kUniform;
  if (text == "soft") return CopyMode::kSoft;
  throw ConfigError("unknown copy mode: " + std::string(text));
}

std::string_view to_string(ModelKind kind) {
  return kind == ModelKind::kTeacher ? "teacher" : "renewnat";
}

ModelKind parse_model_kind(std::string_view text) {
  if (text == "renewnat") return ModelKind::kRenewNat;
  if (text == "teacher") return ModelKind::kTeacher;
  throw ConfigError("unknown model kind: " + std::string(text));
}

void ModelConfig::validate() const {
  if (vocab_size == 0) throw ConfigError("vocab_size must be positive");
  if (d_model == 0 || n_heads == 0 || d_model % n_heads != 0) {
    throw ConfigError("d_model must be a positive multiple of n_heads");
  }
  if (ffn_dim == 0) throw ConfigError("ffn_dim must be positive");
  if (enc_layers == 0) throw ConfigError("enc_layers must be positive");
  if (dec_layers == 0) throw ConfigError("dec_layers must be positive");
  if (kind == ModelKind::kRenewNat && mlm_layers >= dec_layers) {
    throw ConfigError("mlm_layers (K) must be smaller than dec_layers (N)");
  }
  if (max_len < 2) throw ConfigError("max_len must be at least 2");
  if (dropout < 0 || dropout >= 1) throw ConfigError("dropout must be in [0, 1)");
  if (soft_copy_tau <= 0) throw ConfigError("soft_copy_tau must be positive");
  if (length_offset_limit == 0) throw ConfigError("length_offset_limit must be positive");
}

RENEWNAT_NAMESPACE_END
