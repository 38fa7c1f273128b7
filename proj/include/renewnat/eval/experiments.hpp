// Copyright 2026 The renewnat Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Building blocks shared by the command line and the acceptance suite.

#ifndef RENEWNAT_EVAL_EXPERIMENTS_HPP_
#define RENEWNAT_EVAL_EXPERIMENTS_HPP_

#include <functional>
#include <string>
#include <vector>

#include "renewnat/data/batch.hpp"
#include "renewnat/decoding/decode.hpp"
#include "renewnat/eval/metrics.hpp"
#include "renewnat/eval/run_config.hpp"

RENEWNAT_NAMESPACE_BEGIN

using Sequence = std::vector<TokenId>;

// Fresh parameters for config.kind, drawn from `seed`.
ParameterStore init_model(const ModelConfig& config, std::uint64_t seed);

struct TrainLogEntry {
  std::uint64_t step = 0;
  double lr = 0;
  LossBundle loss;
};

std::string format_log_entry(const TrainLogEntry& entry);
inline constexpr const char* kTrainLogHeader = "step,lr,pot,mlm,len,total";

// config.steps updates over token-count batches of `data`; batches are
// re-planned each epoch from a generator seeded by config.seed.
std::vector<TrainLogEntry> train_model(const RunConfig& config, const std::vector<SentencePair>& data,
                                       ParameterStore& params,
                                       const std::function<void(const TrainLogEntry&)>& on_step = {});

struct CorpusDecode {
  std::vector<Sequence> final;
  std::vector<Sequence> potential;
  std::vector<std::size_t> masked;  // per sentence
  double seconds = 0;
};

CorpusDecode decode_sources(const Decoder& decoder, const std::vector<Sequence>& sources,
                            const DecodeConfig& config);

std::vector<Sequence> teacher_translate(const ParameterStore& params, const ModelConfig& config,
                                        const std::vector<Sequence>& sources, std::size_t beam);

// Metrics over id sequences, treating each id as a token.
std::vector<Tokens> as_tokens(const std::vector<Sequence>& sequences);
double sequence_bleu(const std::vector<Sequence>& hypotheses, const std::vector<Sequence>& references);
double sequence_repetition(const std::vector<Sequence>& hypotheses);

struct AlphaRow {
  double alpha = 0;
  double bleu = 0;
  double potential_bleu = 0;
  double repetition = 0;
  double potential_repetition = 0;
  // Masked positions over all positions.
  double mask_fraction = 0;
};

// Single-length decoding at every grid value, reusing one NAT pass per
// sentence. In ratio mode the grid holds delta values.
std::vector<AlphaRow> sweep_alpha(const Decoder& decoder, const std::vector<Sequence>& sources,
                                  const std::vector<Sequence>& references,
                                  const std::vector<double>& grid, const DecodeConfig& base);

// "lo:hi:step", inclusive of hi up to rounding.
std::vector<double> parse_grid(const std::string& spec);

RENEWNAT_NAMESPACE_END

#endif  // RENEWNAT_EVAL_EXPERIMENTS_HPP_
