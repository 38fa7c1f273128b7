// Copyright 2026 The renewnat Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef RENEWNAT_EVAL_METRICS_HPP_
#define RENEWNAT_EVAL_METRICS_HPP_

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "renewnat/base.hpp"

RENEWNAT_NAMESPACE_BEGIN

using Tokens = std::vector<std::string>;

struct BleuStats {
  std::array<std::size_t, 4> matches{};
  std::array<std::size_t, 4> totals{};
  std::size_t hyp_len = 0;
  std::size_t ref_len = 0;

  BleuStats& operator+=(const BleuStats& other);
  // Modified n-gram precision for n = 1..4.
  double precision(std::size_t n) const;
  double brevity_penalty() const;
  // Corpus BLEU-4 in [0, 100]; 0 when any precision is 0.
  double score() const;
};

BleuStats bleu_stats(const Tokens& hypothesis, const Tokens& reference);

// Corpus-level BLEU-4 without smoothing. Throws Error on an empty or
// mismatched corpus.
double bleu(const std::vector<Tokens>& hypotheses, const std::vector<Tokens>& references);

// Tokens equal to their immediate predecessor over all tokens in the corpus.
double repetition_ratio(const std::vector<Tokens>& hypotheses);

struct LengthBucket {
  std::string label;
  std::size_t lo = 0;  // exclusive, except the first bucket
  std::optional<std::size_t> hi;
  std::size_t count = 0;
  double bleu = 0;
};

// Buckets [1,10], (10,20], (20,40], (40,60], (60,inf) keyed by `lengths`;
// only non-empty buckets are returned.
std::vector<LengthBucket> bucket_bleu(const std::vector<Tokens>& hypotheses,
                                      const std::vector<Tokens>& references,
                                      const std::vector<std::size_t>& lengths);

struct LatencyStats {
  double mean_seconds = 0;
  double stddev_seconds = 0;
  std::size_t runs = 0;
  std::size_t warmup = 0;
};

// Times run(i) for i in [0, n) after `warmup` untimed calls.
LatencyStats measure_latency(const std::function<void(std::size_t)>& run, std::size_t n,
                             std::size_t warmup = 10);

// CPU model, logical core count and compiler.
std::string hardware_fingerprint();

// "%.2f".
std::string format_bleu(double value);

RENEWNAT_NAMESPACE_END

#endif  // RENEWNAT_EVAL_METRICS_HPP_
