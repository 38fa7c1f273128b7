// Copyright 2026 The renewnat Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef RENEWNAT_DATA_BATCH_HPP_
#define RENEWNAT_DATA_BATCH_HPP_

#include <cstdint>
#include <vector>

#include "renewnat/transformer/layers.hpp"

RENEWNAT_NAMESPACE_BEGIN

// Reserved vocabulary ids. BOS and EOS are used by the teacher only.
inline constexpr TokenId kPadId = 0;
inline constexpr TokenId kUnkId = 1;
inline constexpr TokenId kMaskId = 2;
inline constexpr TokenId kLengthId = 3;
inline constexpr TokenId kBosId = 4;
inline constexpr TokenId kEosId = 5;
inline constexpr std::size_t kReservedTokens = 6;

struct SentencePair {
  std::vector<TokenId> source;
  std::vector<TokenId> target;
};

// Padded sentence pairs. Every source row starts with kLengthId, so
// source.lengths[b] == T_X + 1.
struct Batch {
  PaddedTokens source;
  PaddedTokens target;
  // 1 exactly at PAD positions.
  std::vector<std::uint8_t> source_pad;
  std::vector<std::uint8_t> target_pad;

  std::size_t size() const { return source.batch; }
  std::size_t source_length(std::size_t b) const { return source.lengths[b] - 1; }
  std::size_t target_length(std::size_t b) const { return target.lengths[b]; }
};

// Pads `pairs` into one batch (prepending [LENGTH] to each source).
// Throws LengthError on an empty side.
Batch make_batch(const std::vector<SentencePair>& pairs);

// Strips padding and [LENGTH] again.
std::vector<SentencePair> unbatch(const Batch& batch);

RENEWNAT_NAMESPACE_END

#endif  // RENEWNAT_DATA_BATCH_HPP_
