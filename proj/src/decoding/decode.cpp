// Copyright 2026 The renewnat Authors.
// SPDX-License-Identifier: Apache-2.0

#include "renewnat/decoding/decode.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "renewnat/model/teacher.hpp"

RENEWNAT_NAMESPACE_BEGIN

std::string_view to_string(DistinguishMode mode) {
  return mode == DistinguishMode::kThreshold ? "threshold" : "ratio";
}

DistinguishMode parse_distinguish_mode(std::string_view text) {
  if (text == "threshold") return DistinguishMode::kThreshold;
  if (text == "ratio") return DistinguishMode::kRatio;
  throw ConfigError("unknown distinguish mode: " + std::string(text));
}

std::string_view to_string(NpdScoring scoring) {
  return scoring == NpdScoring::kSelf ? "self" : "teacher";
}

NpdScoring parse_npd_scoring(std::string_view text) {
  if (text == "self") return NpdScoring::kSelf;
  if (text == "teacher") return NpdScoring::kTeacher;
  throw ConfigError("unknown NPD scoring: " + std::string(text));
}

void DecodeConfig::validate() const {
  if (alpha < 0 || alpha > 1) throw ConfigError("alpha must be in [0,1]");
  if (delta < 0 || delta > 1) throw ConfigError("delta must be in [0,1]");
  if (length_beam == 0) throw ConfigError("length beam must be >= 1");
  if (max_len == 0) throw ConfigError("max decode length must be >= 1");
  if (forced_length && *forced_length == 0) throw ConfigError("forced length must be >= 1");
}

std::vector<std::size_t> predict_length(std::span<const Scalar> length_scores,
                                        std::size_t source_len, std::size_t top_m,
                                        std::size_t offset_limit, std::size_t max_len) {
  if (length_scores.size() != 2 * offset_limit + 1) {
    throw ShapeError("predict_length: expected " + std::to_string(2 * offset_limit + 1) +
                     " classes, got " + std::to_string(length_scores.size()));
  }
  const auto limit = static_cast<long long>(offset_limit);
  std::vector<long long> deltas(length_scores.size());
  std::iota(deltas.begin(), deltas.end(), -limit);
  std::sort(deltas.begin(), deltas.end(), [&](long long a, long long b) {
    const Scalar sa = length_scores[static_cast<std::size_t>(a + limit)];
    const Scalar sb = length_scores[static_cast<std::size_t>(b + limit)];
    if (sa != sb) return sa > sb;
    if (std::llabs(a) != std::llabs(b)) return std::llabs(a) < std::llabs(b);
    return a < b;
  });
  std::vector<std::size_t> lengths;
  for (long long delta : deltas) {
    if (lengths.size() == top_m) break;
    const long long raw = static_cast<long long>(source_len) + delta;
    const auto len = static_cast<std::size_t>(std::clamp<long long>(raw, 1, static_cast<long long>(max_len)));
    if (std::find(lengths.begin(), lengths.end(), len) == lengths.end()) lengths.push_back(len);
  }
  return lengths;
}

std::vector<std::size_t> select_mask_positions(const PotentialTranslation& pot,
                                               const DecodeConfig& config) {
  const std::size_t n = pot.confidence.size();
  std::vector<std::size_t> out;
  if (config.mode == DistinguishMode::kThreshold) {
    for (std::size_t i = 0; i < n; ++i) {
      if (static_cast<double>(pot.confidence[i]) < config.alpha) out.push_back(i);
    }
    return out;
  }
  const auto count = std::min(
      n, static_cast<std::size_t>(std::floor(config.delta * static_cast<double>(n) + 1e-9)));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return pot.confidence[a] < pot.confidence[b];
  });
  out.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(count));
  std::sort(out.begin(), out.end());
  return out;
}

Decoder::Decoder(const ModelConfig& config, const ParameterStore& params)
    : config_(config), params_(params) {
  config_.validate();
  if (config_.kind != ModelKind::kRenewNat) throw ConfigError("Decoder: not a RenewNAT model");
}

void Decoder::set_teacher(const ModelConfig* config, const ParameterStore* params) {
  teacher_config_ = config;
  teacher_params_ = params;
}

Decoder::Session Decoder::start(std::span<const TokenId> source) const {
  if (source.empty()) throw LengthError("decode: empty source");
  Session s;
  s.tape_ = std::make_unique<Tape>(false);
  ForwardContext ctx{*s.tape_, params_, config_};
  std::vector<TokenId> src{kLengthId};
  src.insert(src.end(), source.begin(), source.end());
  s.source_ = PaddedTokens::single(src);
  s.enc_ = encode(ctx, s.source_);
  s.source_len_ = source.size();
  const Array log_probs = log_softmax_rows(s.tape_->value(length_logits(ctx, s.enc_)));
  s.length_scores_.assign(log_probs.data().begin(), log_probs.data().end());
  return s;
}

std::vector<std::size_t> Decoder::candidate_lengths(const Session& session,
                                                    const DecodeConfig& config) const {
  if (config.forced_length) return {*config.forced_length};
  return predict_length(session.length_scores_, session.source_len_, config.length_beam,
                        config_.length_offset_limit, std::min(config.max_len, config_.max_len));
}

void Decoder::propose(Session& session, std::size_t target_len) const {
  ForwardContext ctx{*session.tape_, params_, config_};
  const std::vector<std::size_t> lengths{target_len};
  Var h = decoder_input_from_source(ctx, session.source_, lengths, target_len);
  Var logits = nat_logits(ctx, h, session.enc_, lengths, target_len);
  session.potential_ = potential_from_logits(session.tape_->value(logits));
}

DecodeResult Decoder::renew(const Session& session, std::span<const std::size_t> masked) const {
  const PotentialTranslation& pot = session.potential_;
  const std::size_t n = pot.size();
  DecodeResult result;
  result.potential = pot.tokens;
  result.tokens = pot.tokens;
  result.candidate_lengths = {n};
  result.nat_passes = 1;

  std::vector<double> chosen(n);
  for (std::size_t i = 0; i < n; ++i) {
    chosen[i] = pot.log_probs.at(i, static_cast<std::size_t>(pot.tokens[i]));
  }
  if (!masked.empty() && config_.has_mlm()) {
    ForwardContext ctx{*session.tape_, params_, config_};
    PaddedTokens grid = PaddedTokens::single(pot.tokens);
    for (std::size_t i : masked) grid.ids.at(i) = kMaskId;
    const Array log_probs = log_softmax_rows(session.tape_->value(mlm_logits(ctx, grid, session.enc_)));
    for (std::size_t i : masked) {
      auto row = log_probs.row(i);
      const auto best = static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
      result.tokens[i] = static_cast<TokenId>(best);
      chosen[i] = row[best];
    }
    result.renewed.assign(masked.begin(), masked.end());
    result.mlm_passes = 1;
  }
  result.candidate_scores = {std::accumulate(chosen.begin(), chosen.end(), 0.0) /
                             static_cast<double>(n)};
  return result;
}

DecodeResult Decoder::decode(std::span<const TokenId> source, const DecodeConfig& config) const {
  config.validate();
  if (config.scoring == NpdScoring::kTeacher && (!teacher_config_ || !teacher_params_)) {
    throw ConfigError("teacher NPD scoring requested without a teacher");
  }
  const auto t0 = std::chrono::steady_clock::now();
  Session session = start(source);
  const auto lengths = candidate_lengths(session, config);

  DecodeResult best;
  std::vector<double> scores;
  std::size_t nat_passes = 0;
  std::size_t mlm_passes = 0;
  for (std::size_t c = 0; c < lengths.size(); ++c) {
    propose(session, lengths[c]);
    const auto masked = select_mask_positions(session.potential(), config);
    DecodeResult candidate = renew(session, masked);
    nat_passes += candidate.nat_passes;
    mlm_passes += candidate.mlm_passes;
    double score = candidate.candidate_scores.front();
    if (lengths.size() > 1 && config.scoring == NpdScoring::kTeacher) {
      score = teacher_sequence_log_prob(*teacher_params_, *teacher_config_, source, candidate.tokens) /
              static_cast<double>(candidate.tokens.size() + 1);
    }
    scores.push_back(score);
    const bool better = c == 0 || score > scores[best.chosen] ||
                        (score == scores[best.chosen] && lengths[c] < best.tokens.size());
    if (better) {
      best = std::move(candidate);
      best.chosen = c;
    }
  }
  best.candidate_lengths = lengths;
  best.candidate_scores = std::move(scores);
  best.nat_passes = nat_passes;
  best.mlm_passes = mlm_passes;
  best.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return best;
}

namespace {

struct Hypothesis {
  std::vector<TokenId> tokens;
  double log_prob = 0;
};

bool banned(TokenId id) {
  return id == kPadId || id == kMaskId || id == kLengthId || id == kBosId;
}

}  // namespace

BeamResult teacher_beam_search(const ParameterStore& params, const ModelConfig& config,
                               std::span<const TokenId> source, std::size_t beam_size,
                               std::size_t max_len) {
  if (beam_size == 0) throw ConfigError("beam size must be >= 1");
  if (source.empty()) throw LengthError("beam search: empty source");
  max_len = std::min(max_len, config.max_len - 1);
  TeacherDecoderState state(params, config, source);

  std::vector<Hypothesis> live(1);
  std::vector<TokenId> last{kBosId};
  std::vector<std::size_t> parents{0};
  std::vector<BeamResult> finished;

  struct Candidate {
    double log_prob;
    std::size_t row;
    TokenId token;
  };

  for (std::size_t t = 0; t <= max_len && !live.empty(); ++t) {
    const Array log_probs = state.step(last, parents);
    std::vector<Candidate> candidates;
    for (std::size_t r = 0; r < live.size(); ++r) {
      auto row = log_probs.row(r);
      for (std::size_t v = 0; v < row.size(); ++v) {
        const auto id = static_cast<TokenId>(v);
        if (banned(id)) continue;
        candidates.push_back({live[r].log_prob + row[v], r, id});
      }
    }
    const std::size_t keep = std::min(candidates.size(), 2 * beam_size);
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep),
                      candidates.end(), [](const Candidate& a, const Candidate& b) {
                        if (a.log_prob != b.log_prob) return a.log_prob > b.log_prob;
                        if (a.row != b.row) return a.row < b.row;
                        return a.token < b.token;
                      });
    std::vector<Hypothesis> next;
    last.clear();
    parents.clear();
    for (std::size_t i = 0; i < keep && next.size() < beam_size; ++i) {
      const Candidate& c = candidates[i];
      if (c.token != kEosId && t == max_len) continue;
      if (c.token == kEosId) {
        if (finished.size() < beam_size) {
          const auto& toks = live[c.row].tokens;
          finished.push_back({toks, c.log_prob / static_cast<double>(toks.size() + 1), true});
        }
        continue;
      }
      Hypothesis h{live[c.row].tokens, c.log_prob};
      h.tokens.push_back(c.token);
      next.push_back(std::move(h));
      last.push_back(c.token);
      parents.push_back(c.row);
    }
    if (finished.size() >= beam_size || t == max_len) break;
    live = std::move(next);
  }

  if (finished.empty()) {
    BeamResult out;
    out.tokens = live.front().tokens;
    out.score = live.front().log_prob / static_cast<double>(std::max<std::size_t>(1, out.tokens.size()));
    out.finished = false;
    return out;
  }
  return *std::max_element(finished.begin(), finished.end(),
                           [](const BeamResult& a, const BeamResult& b) { return a.score < b.score; });
}

RENEWNAT_NAMESPACE_END
