// Copyright 2026 The renewnat Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef RENEWNAT_DATA_DISTILL_HPP_
#define RENEWNAT_DATA_DISTILL_HPP_

#include <string>
#include <vector>

#include "renewnat/data/batch.hpp"
#include "renewnat/numerics/parameter_store.hpp"
#include "renewnat/transformer/model_config.hpp"

RENEWNAT_NAMESPACE_BEGIN

struct DistillReport {
  std::size_t replaced = 0;
  std::size_t kept = 0;
  std::vector<std::string> warnings;
};

// Replaces each target with the teacher's beam search output for its source.
// A line whose search yields no tokens or hits max_len without [EOS] keeps its
// original target and adds a warning.
std::vector<SentencePair> distill(const std::vector<SentencePair>& corpus,
                                  const ParameterStore& teacher, const ModelConfig& config,
                                  std::size_t beam_size, DistillReport* report = nullptr);

RENEWNAT_NAMESPACE_END

#endif  // RENEWNAT_DATA_DISTILL_HPP_
