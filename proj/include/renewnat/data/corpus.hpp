// Copyright 2026 The renewnat Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef RENEWNAT_DATA_CORPUS_HPP_
#define RENEWNAT_DATA_CORPUS_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "renewnat/data/vocabulary.hpp"
#include "renewnat/numerics/rng.hpp"

RENEWNAT_NAMESPACE_BEGIN

struct ParallelText {
  std::vector<std::string> source;
  std::vector<std::string> target;

  std::size_t size() const { return source.size(); }
};

std::vector<std::string> read_lines(const std::filesystem::path& path);
void write_lines(const std::filesystem::path& path, const std::vector<std::string>& lines);

// Reads <dir>/<name>.src and <dir>/<name>.tgt; their line counts must match.
ParallelText read_parallel(const std::filesystem::path& dir, std::string_view name);
void write_parallel(const ParallelText& text, const std::filesystem::path& dir, std::string_view name);

// Throws LengthError naming the line when a side is empty or longer than
// max_len (the source budget includes the [LENGTH] token).
std::vector<SentencePair> encode_corpus(const ParallelText& text, const Vocabulary& vocab,
                                        std::size_t max_len);
ParallelText decode_corpus(const std::vector<SentencePair>& pairs, const Vocabulary& vocab);

enum class SyntheticTask { kCopy, kReverse, kNoisySort };
std::string_view to_string(SyntheticTask task);
SyntheticTask parse_synthetic_task(std::string_view text);

struct SyntheticSpec {
  SyntheticTask task = SyntheticTask::kCopy;
  // Symbols are the decimal strings "0" .. "vocab_size-1".
  std::size_t vocab_size = 50;
  std::size_t min_len = 5;
  std::size_t max_len = 15;
  std::size_t count = 1000;
  std::uint64_t seed = 1;
};

// copy: Y = X. reverse: Y = reversed X. noisy_sort: Y = X sorted by value,
// with every repeat of a symbol beyond its first occurrence independently
// dropped with probability 1/2, so one source has several valid targets.
ParallelText make_synthetic(const SyntheticSpec& spec);

// Groups pairs of similar length so that batch_size * (max source length + 1
// + max target length) <= max_tokens. A pair that alone exceeds the budget
// forms its own batch. Batch order is shuffled with `rng`.
std::vector<std::vector<std::size_t>> plan_batches(const std::vector<SentencePair>& pairs,
                                                   std::size_t max_tokens, Rng& rng);

std::vector<Batch> make_batches(const std::vector<SentencePair>& pairs, std::size_t max_tokens,
                                Rng& rng);

RENEWNAT_NAMESPACE_END

#endif  // RENEWNAT_DATA_CORPUS_HPP_
