// Copyright 2026 The renewnat Authors.
// SPDX-License-Identifier: Apache-2.0

#include "renewnat/data/distill.hpp"

#include "renewnat/decoding/decode.hpp"

RENEWNAT_NAMESPACE_BEGIN

std::vector<SentencePair> distill(const std::vector<SentencePair>& corpus,
                                  const ParameterStore& teacher, const ModelConfig& config,
                                  std::size_t beam_size, DistillReport* report) {
  DistillReport local;
  DistillReport& r = report ? *report : local;
  std::vector<SentencePair> out;
  out.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    SentencePair pair = corpus[i];
    std::string problem;
    try {
      BeamResult beam = teacher_beam_search(teacher, config, pair.source, beam_size, config.max_len);
      if (beam.tokens.empty()) {
        problem = "empty teacher output";
      } else if (!beam.finished) {
        problem = "no [EOS] within max_len";
      } else {
        pair.target = std::move(beam.tokens);
      }
    } catch (const Error& e) {
      problem = e.what();
    }
    if (problem.empty()) {
      ++r.replaced;
    } else {
      ++r.kept;
      r.warnings.push_back("line " + std::to_string(i + 1) + ": " + problem + "; kept original target");
    }
    out.push_back(std::move(pair));
  }
  return out;
}

RENEWNAT_NAMESPACE_END
