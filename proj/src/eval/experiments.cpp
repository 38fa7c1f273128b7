// Copyright 2026 The renewnat Authors.
// SPDX-License-Identifier: Apache-2.0

#include "renewnat/eval/experiments.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>

#include "renewnat/data/corpus.hpp"
#include "renewnat/model/teacher.hpp"

RENEWNAT_NAMESPACE_BEGIN

ParameterStore init_model(const ModelConfig& config, std::uint64_t seed) {
  ParameterStore store;
  Rng rng(seed);
  if (config.kind == ModelKind::kTeacher) {
    init_teacher(store, config, rng);
  } else {
    init_renewnat(store, config, rng);
  }
  return store;
}

std::string format_log_entry(const TrainLogEntry& e) {
  char buf[192];
  std::snprintf(buf, sizeof buf, "%llu,%.9g,%.9g,%.9g,%.9g,%.9g",
                static_cast<unsigned long long>(e.step), e.lr, e.loss.pot, e.loss.mlm, e.loss.len,
                e.loss.total);
  return buf;
}

std::vector<TrainLogEntry> train_model(const RunConfig& config, const std::vector<SentencePair>& data,
                                       ParameterStore& params,
                                       const std::function<void(const TrainLogEntry&)>& on_step) {
  if (data.empty()) throw Error("train: empty training corpus");
  TrainConfig train = config.train;
  if (train.total_steps == 0) train.total_steps = config.steps;
  Trainer trainer(config.model, train, params, config.seed);
  Rng batch_rng(config.seed ^ 0x5bd1e995ULL);

  std::vector<Batch> batches;
  std::size_t next = 0;
  std::vector<TrainLogEntry> log;
  log.reserve(config.steps);
  for (std::uint64_t s = 0; s < config.steps; ++s) {
    if (next == batches.size()) {
      batches = make_batches(data, train.batch_tokens, batch_rng);
      next = 0;
    }
    TrainLogEntry entry;
    entry.lr = trainer.current_lr();
    entry.loss = trainer.train_step(batches[next++]);
    entry.step = trainer.step();
    if (on_step) on_step(entry);
    log.push_back(entry);
  }
  return log;
}

CorpusDecode decode_sources(const Decoder& decoder, const std::vector<Sequence>& sources,
                            const DecodeConfig& config) {
  CorpusDecode out;
  const auto t0 = std::chrono::steady_clock::now();
  for (const auto& src : sources) {
    DecodeResult r = decoder.decode(src, config);
    out.masked.push_back(r.renewed.size());
    out.final.push_back(std::move(r.tokens));
    out.potential.push_back(std::move(r.potential));
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

std::vector<Sequence> teacher_translate(const ParameterStore& params, const ModelConfig& config,
                                        const std::vector<Sequence>& sources, std::size_t beam) {
  std::vector<Sequence> out;
  out.reserve(sources.size());
  for (const auto& src : sources) {
    out.push_back(teacher_beam_search(params, config, src, beam, config.max_len).tokens);
  }
  return out;
}

std::vector<Tokens> as_tokens(const std::vector<Sequence>& sequences) {
  std::vector<Tokens> out;
  out.reserve(sequences.size());
  for (const auto& seq : sequences) {
    Tokens t;
    t.reserve(seq.size());
    for (TokenId id : seq) t.push_back(std::to_string(id));
    out.push_back(std::move(t));
  }
  return out;
}

double sequence_bleu(const std::vector<Sequence>& hypotheses, const std::vector<Sequence>& references) {
  return bleu(as_tokens(hypotheses), as_tokens(references));
}

double sequence_repetition(const std::vector<Sequence>& hypotheses) {
  return repetition_ratio(as_tokens(hypotheses));
}

std::vector<AlphaRow> sweep_alpha(const Decoder& decoder, const std::vector<Sequence>& sources,
                                  const std::vector<Sequence>& references,
                                  const std::vector<double>& grid, const DecodeConfig& base) {
  const std::size_t g = grid.size();
  std::vector<std::vector<Sequence>> finals(g);
  std::vector<std::size_t> masked(g, 0);
  std::vector<Sequence> potentials;
  std::size_t positions = 0;
  for (const auto& src : sources) {
    auto session = decoder.start(src);
    DecodeConfig one = base;
    one.length_beam = 1;
    decoder.propose(session, decoder.candidate_lengths(session, one).front());
    potentials.push_back(session.potential().tokens);
    positions += session.potential().size();
    for (std::size_t k = 0; k < g; ++k) {
      DecodeConfig c = base;
      (c.mode == DistinguishMode::kThreshold ? c.alpha : c.delta) = grid[k];
      const auto m = select_mask_positions(session.potential(), c);
      masked[k] += m.size();
      finals[k].push_back(decoder.renew(session, m).tokens);
    }
  }
  const double pot_bleu = sequence_bleu(potentials, references);
  const double pot_rep = sequence_repetition(potentials);
  std::vector<AlphaRow> rows;
  for (std::size_t k = 0; k < g; ++k) {
    AlphaRow r;
    r.alpha = grid[k];
    r.bleu = sequence_bleu(finals[k], references);
    r.potential_bleu = pot_bleu;
    r.repetition = sequence_repetition(finals[k]);
    r.potential_repetition = pot_rep;
    r.mask_fraction = positions ? static_cast<double>(masked[k]) / static_cast<double>(positions) : 0;
    rows.push_back(r);
  }
  return rows;
}

std::vector<double> parse_grid(const std::string& spec) {
  double lo = 0, hi = 0, step = 0;
  char tail = 0;
  if (std::sscanf(spec.c_str(), "%lf:%lf:%lf%c", &lo, &hi, &step, &tail) != 3 || step <= 0 || hi < lo) {
    throw ConfigError("grid must be lo:hi:step with step > 0 and hi >= lo, got '" + spec + "'");
  }
  std::vector<double> out;
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  for (std::size_t i = 0; i < count; ++i) {
    // Round to 1e-12 so that 0.1 * 3 prints as 0.3.
    out.push_back(std::round((lo + step * static_cast<double>(i)) * 1e12) / 1e12);
  }
  return out;
}

RENEWNAT_NAMESPACE_END
