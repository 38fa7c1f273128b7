// Copyright 2026 The renewnat Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef RENEWNAT_TESTS_SUPPORT_FIXTURES_HPP_
#define RENEWNAT_TESTS_SUPPORT_FIXTURES_HPP_

#include <vector>

#include "renewnat/model/renewnat.hpp"
#include "renewnat/model/teacher.hpp"

namespace fixture {

using namespace renewnat;

inline ModelConfig small_model(std::size_t n = 3, std::size_t k = 1) {
  ModelConfig c;
  c.vocab_size = 20;
  c.d_model = 16;
  c.n_heads = 2;
  c.ffn_dim = 32;
  c.enc_layers = 1;
  c.dec_layers = n;
  c.mlm_layers = k;
  c.max_len = 32;
  c.dropout = 0;
  c.length_offset_limit = 5;
  return c;
}

inline ModelConfig small_teacher() {
  ModelConfig c = small_model(2, 0);
  c.kind = ModelKind::kTeacher;
  return c;
}

inline ParameterStore renewnat_params(const ModelConfig& c, std::uint64_t seed = 1) {
  ParameterStore store;
  Rng rng(seed);
  init_renewnat(store, c, rng);
  return store;
}

inline ParameterStore teacher_params(const ModelConfig& c, std::uint64_t seed = 1) {
  ParameterStore store;
  Rng rng(seed);
  init_teacher(store, c, rng);
  return store;
}

inline TrainConfig quick_train() {
  TrainConfig t;
  t.lr = 1e-3;
  t.warmup_steps = 10;
  t.label_smoothing = 0.1;
  return t;
}

inline std::vector<SentencePair> toy_pairs() {
  return {{{6, 7, 8, 9}, {9, 8, 7, 6}}, {{10, 11, 12}, {12, 11, 10, 10}}, {{13, 14}, {14, 13}}};
}

}  // namespace fixture

#endif  // RENEWNAT_TESTS_SUPPORT_FIXTURES_HPP_
