// Copyright 2026 The renewnat Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef RENEWNAT_DECODING_DECODE_HPP_
#define RENEWNAT_DECODING_DECODE_HPP_

#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "renewnat/model/renewnat.hpp"

RENEWNAT_NAMESPACE_BEGIN

enum class DistinguishMode { kThreshold, kRatio };
std::string_view to_string(DistinguishMode mode);
DistinguishMode parse_distinguish_mode(std::string_view text);

enum class NpdScoring { kSelf, kTeacher };
std::string_view to_string(NpdScoring scoring);
NpdScoring parse_npd_scoring(std::string_view text);

inline constexpr double kAlphaVanilla = 0.6;
inline constexpr double kAlphaGlancing = 0.7;

struct DecodeConfig {
  double alpha = kAlphaVanilla;
  double delta = 0.3;
  DistinguishMode mode = DistinguishMode::kThreshold;
  // Length beam m.
  std::size_t length_beam = 1;
  std::size_t max_len = 128;
  NpdScoring scoring = NpdScoring::kSelf;
  // Overrides the length head (benchmarks only).
  std::optional<std::size_t> forced_length;

  void validate() const;
};

struct DecodeResult {
  std::vector<TokenId> tokens;
  std::vector<TokenId> potential;
  std::vector<std::size_t> renewed;
  // One entry per length candidate, in candidate order.
  std::vector<std::size_t> candidate_lengths;
  std::vector<double> candidate_scores;
  std::size_t chosen = 0;
  double seconds = 0;
  std::size_t nat_passes = 0;
  std::size_t mlm_passes = 0;
};

// Top-m lengths T_X + delta from one row of length-head scores, in descending
// score order with ties broken by smaller |delta| then smaller delta. Lengths
// are clamped to [1, max_len]; duplicates created by clamping are dropped.
std::vector<std::size_t> predict_length(std::span<const Scalar> length_scores,
                                        std::size_t source_len, std::size_t top_m,
                                        std::size_t offset_limit, std::size_t max_len);

// threshold: {i : confidence[i] < alpha}; ratio: the floor(delta * T)
// lowest-confidence positions, ties to the lower index. Ascending order.
std::vector<std::size_t> select_mask_positions(const PotentialTranslation& pot,
                                               const DecodeConfig& config);

// Single-sentence inference over read-only parameters.
class Decoder {
 public:
  Decoder(const ModelConfig& config, const ParameterStore& params);

  // Optional AR teacher, needed for NpdScoring::kTeacher.
  void set_teacher(const ModelConfig* config, const ParameterStore* params);

  // Length beam m = config.length_beam; m = 1 is the single-pass decode.
  DecodeResult decode(std::span<const TokenId> source, const DecodeConfig& config) const;

  // Encoder, length head and NAT pass for a fixed length, kept for reuse
  // across masking settings.
  class Session {
   public:
    const PotentialTranslation& potential() const { return potential_; }
    std::size_t source_len() const { return source_len_; }

   private:
    friend class Decoder;
    std::unique_ptr<Tape> tape_;
    PaddedTokens source_;
    EncoderOutput enc_;
    PotentialTranslation potential_;
    std::size_t source_len_ = 0;
    std::vector<Scalar> length_scores_;
  };

  // Encodes `source` and scores lengths.
  Session start(std::span<const TokenId> source) const;
  std::vector<std::size_t> candidate_lengths(const Session& session, const DecodeConfig& config) const;
  // NAT sub-module pass at length T; replaces the session's potential translation.
  void propose(Session& session, std::size_t target_len) const;
  // One MLM pass over Y_pot with [MASK] at `masked`; skipped when empty.
  // candidate_scores holds the mean chosen-token log-prob, taken from the MLM
  // at renewed positions and from the NAT pass elsewhere.
  DecodeResult renew(const Session& session, std::span<const std::size_t> masked) const;

  const ModelConfig& config() const { return config_; }

 private:
  ModelConfig config_;
  const ParameterStore& params_;
  const ModelConfig* teacher_config_ = nullptr;
  const ParameterStore* teacher_params_ = nullptr;
};

struct BeamResult {
  std::vector<TokenId> tokens;  // without BOS and EOS
  double score = 0;             // log-prob sum over tokens and EOS, divided by that count
  bool finished = true;         // false when truncated at max_len
};

// Length-normalized beam search of the AR teacher with EOS termination.
BeamResult teacher_beam_search(const ParameterStore& params, const ModelConfig& config,
                               std::span<const TokenId> source, std::size_t beam_size,
                               std::size_t max_len);

RENEWNAT_NAMESPACE_END

#endif  // RENEWNAT_DECODING_DECODE_HPP_
