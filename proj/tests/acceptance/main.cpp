// Copyright 2026 The renewnat Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "../support/bleu_fixtures.hpp"
#include "criteria.hpp"
#include "renewnat/data/corpus.hpp"
#include "renewnat/data/distill.hpp"
#include "renewnat/eval/checkpoint.hpp"
#include "renewnat/eval/cli.hpp"
#include "renewnat/eval/experiments.hpp"
#include "renewnat/model/teacher.hpp"

using namespace renewnat;
namespace fs = std::filesystem;

namespace {

bool g_verbose = false;

void note(const std::string& s) {
  if (g_verbose) std::cerr << "  " << s << std::endl;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

struct Outcome {
  bool pass = false;
  std::string detail;
};

// --- shared experiment pieces ---------------------------------------------------

struct TaskData {
  Vocabulary vocab;
  std::vector<SentencePair> train, dev, test;
};

TaskData make_task(SyntheticTask task, std::size_t symbols, std::size_t train, std::size_t dev,
                   std::size_t test, std::uint64_t seed, std::size_t max_len,
                   std::size_t min_len = 5, std::size_t max_sentence = 15) {
  SyntheticSpec spec;
  spec.task = task;
  spec.vocab_size = symbols;
  spec.min_len = min_len;
  spec.max_len = max_sentence;
  auto split = [&](std::size_t count, std::uint64_t s) {
    spec.count = count;
    spec.seed = s;
    return make_synthetic(spec);
  };
  const ParallelText tr = split(train, seed);
  const ParallelText dv = split(dev, seed + 1000);
  const ParallelText te = split(test, seed + 2000);
  std::vector<std::string> lines = tr.source;
  lines.insert(lines.end(), tr.target.begin(), tr.target.end());
  TaskData d;
  d.vocab = Vocabulary::build(lines);
  d.train = encode_corpus(tr, d.vocab, max_len);
  d.dev = encode_corpus(dv, d.vocab, max_len);
  d.test = encode_corpus(te, d.vocab, max_len);
  return d;
}

std::vector<Sequence> sources(const std::vector<SentencePair>& pairs) {
  std::vector<Sequence> out;
  for (const auto& p : pairs) out.push_back(p.source);
  return out;
}

std::vector<Sequence> targets(const std::vector<SentencePair>& pairs) {
  std::vector<Sequence> out;
  for (const auto& p : pairs) out.push_back(p.target);
  return out;
}

ModelConfig nat_model(std::size_t vocab, std::size_t n, std::size_t k) {
  ModelConfig c;
  c.vocab_size = vocab;
  c.d_model = 64;
  c.n_heads = 4;
  c.ffn_dim = 256;
  c.enc_layers = 2;
  c.dec_layers = n;
  c.mlm_layers = k;
  c.max_len = 32;
  c.dropout = 0.1;
  c.length_offset_limit = 10;
  return c;
}

RunConfig run_config(const ModelConfig& model, std::uint64_t steps, std::uint64_t seed) {
  RunConfig r;
  r.model = model;
  r.steps = steps;
  r.seed = seed;
  r.train.lr = 1e-3;
  r.train.warmup_steps = 200;
  r.train.batch_tokens = 2048;
  return r;
}

ParameterStore train(const RunConfig& config, const std::vector<SentencePair>& data,
                     const std::string& label) {
  ParameterStore params = init_model(config.model, config.seed);
  Stopwatch sw;
  double running = 0;
  train_model(config, data, params, [&](const TrainLogEntry& e) {
    running = e.step == 1 ? e.loss.total : 0.98 * running + 0.02 * e.loss.total;
    if (e.step % 500 == 0) {
      note(label + " step " + std::to_string(e.step) + " loss " + fmt("%.4f", running) + " (" +
           fmt("%.0f", sw.seconds()) + " s)");
    }
  });
  return params;
}

// Best BLEU on `dev` over the threshold grid; ties go to the smaller alpha.
double tune_alpha(const Decoder& decoder, const std::vector<SentencePair>& dev) {
  const auto grid = parse_grid("0:1:0.05");
  const auto rows = sweep_alpha(decoder, sources(dev), targets(dev), grid, DecodeConfig{});
  const AlphaRow* best = &rows.front();
  for (const auto& r : rows) {
    if (r.bleu > best->bleu) best = &r;
  }
  note("dev: alpha " + fmt("%.2f", best->alpha) + " bleu " + format_bleu(best->bleu) +
       " potential " + format_bleu(best->potential_bleu));
  return best->alpha;
}

AlphaRow evaluate_at(const Decoder& decoder, const std::vector<SentencePair>& test, double alpha) {
  return sweep_alpha(decoder, sources(test), targets(test), {alpha}, DecodeConfig{}).front();
}

// --- criteria -------------------------------------------------------------------

Outcome gradient_check() {
  const acceptance::GradcheckOutcome r = acceptance::toy_gradcheck();
  Outcome o;
  o.pass = r.max_relative_error < 1e-3 && r.seconds < 60 && r.checked > 0;
  o.detail = "max relative error " + fmt("%.3g", r.max_relative_error) + " over " +
             std::to_string(r.checked) + " entries (worst " + r.worst_param + "), " +
             fmt("%.1f", r.seconds) + " s";
  return o;
}

Outcome masked_loss_isolation() {
  Rng rng(2024);
  std::size_t observed_rows = 0, nonzero_masked = 0, masked_rows = 0, violations = 0;
  for (int trial = 0; trial < 100; ++trial) {
    ModelConfig c;
    c.vocab_size = kReservedTokens + 4 + rng.below(20);
    c.d_model = 8 * (1 + rng.below(2));
    c.n_heads = 2;
    c.ffn_dim = 2 * c.d_model;
    c.enc_layers = 1;
    c.dec_layers = 2 + rng.below(2);
    c.mlm_layers = 1 + rng.below(c.dec_layers - 1);
    c.max_len = 24;
    c.dropout = 0;
    c.length_offset_limit = 4;
    ParameterStore params = init_model(c, rng.next());

    auto random_tokens = [&](std::size_t n) {
      std::vector<TokenId> t(n);
      for (auto& x : t) x = static_cast<TokenId>(kReservedTokens + rng.below(c.vocab_size - kReservedTokens));
      return t;
    };
    const auto reference = random_tokens(1 + rng.below(12));
    auto source = random_tokens(1 + rng.below(12));
    source.insert(source.begin(), kLengthId);
    const MaskedInput mask = uniform_mask(reference, rng);

    Tape tape;
    ForwardContext ctx{tape, params, c};
    const EncoderOutput enc = encode(ctx, PaddedTokens::single(source));
    Var logits = mlm_logits(ctx, PaddedTokens::single(mask.tokens), enc);
    Var loss = mlm_loss(tape, logits, reference, mask.masked);
    tape.backward(loss);
    const Array& g = tape.grad(logits);
    for (std::size_t i : mask.observed) {
      ++observed_rows;
      for (Scalar x : g.row(i)) violations += x != Scalar(0);
    }
    for (std::size_t i : mask.masked) {
      ++masked_rows;
      bool any = false;
      for (Scalar x : g.row(i)) any |= x != Scalar(0);
      nonzero_masked += any;
    }
  }
  Outcome o;
  o.pass = violations == 0 && nonzero_masked == masked_rows && observed_rows > 0;
  o.detail = std::to_string(violations) + " nonzero entries over " + std::to_string(observed_rows) +
             " observed rows; " + std::to_string(nonzero_masked) + "/" + std::to_string(masked_rows) +
             " masked rows carry gradient (100 trials)";
  return o;
}

int cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_command(args, out, err);
  if (code != kExitOk) note("cli: " + err.str());
  return code;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome alpha_zero_identity(const fs::path& scratch) {
  Rng rng(33);
  std::size_t mismatches = 0, sentences = 0;
  for (int m = 0; m < 10; ++m) {
    ModelConfig c = nat_model(30, 3, 1 + rng.below(2));
    c.d_model = 16;
    c.ffn_dim = 32;
    c.dropout = 0;
    const ParameterStore params = init_model(c, rng.next());
    const Decoder decoder(c, params);
    for (int s = 0; s < 10; ++s) {
      std::vector<TokenId> src(1 + rng.below(15));
      for (auto& x : src) x = static_cast<TokenId>(kReservedTokens + rng.below(24));
      DecodeConfig dc;
      dc.alpha = 0;
      const DecodeResult r = decoder.decode(src, dc);

      // Potential translation through the batched training graph.
      Tape tape(false);
      ForwardContext ctx{tape, params, c};
      std::vector<TokenId> with_length{kLengthId};
      with_length.insert(with_length.end(), src.begin(), src.end());
      const PaddedTokens padded = PaddedTokens::single(with_length);
      const EncoderOutput enc = encode(ctx, padded);
      const std::size_t t = r.tokens.size();
      const std::vector<std::size_t> lens{t};
      Var h = decoder_input_from_source(ctx, padded, lens, t);
      const PotentialTranslation pot = potential_from_logits(tape.value(nat_logits(ctx, h, enc, lens, t)));
      ++sentences;
      mismatches += r.tokens != pot.tokens || !r.renewed.empty() || r.mlm_passes != 0;
    }
  }

  // Through the command line on a saved checkpoint.
  const fs::path dir = scratch / "alpha_zero";
  fs::create_directories(dir);
  bool cli_identical = false;
  if (cli({"make-data", "--task", "reverse", "--out", (dir / "data").string(), "--vocab", "20", "--train",
           "50", "--valid", "10", "--test", "40", "--seed", "4"}) == kExitOk) {
    const ParallelText text = read_parallel(dir / "data", "train");
    std::vector<std::string> lines = text.source;
    lines.insert(lines.end(), text.target.begin(), text.target.end());
    ModelBundle bundle;
    bundle.vocab = Vocabulary::build(lines);
    bundle.config.model = nat_model(bundle.vocab.size(), 3, 1);
    bundle.params = init_model(bundle.config.model, 9);
    save_bundle(dir / "m.rnat", bundle);
    const fs::path hyp = dir / "hyp", pot = dir / "pot";
    cli_identical = cli({"translate", "--ckpt", (dir / "m.rnat").string(), "--input",
                         (dir / "data" / "test.src").string(), "--alpha", "0", "--out", hyp.string(),
                         "--potential", pot.string()}) == kExitOk &&
                    slurp(hyp) == slurp(pot) && !slurp(hyp).empty();
  }

  // Monotonicity of the masked set in alpha.
  std::size_t subset_failures = 0;
  for (int v = 0; v < 1000; ++v) {
    PotentialTranslation p;
    const std::size_t n = 1 + rng.below(40);
    for (std::size_t i = 0; i < n; ++i) {
      p.tokens.push_back(kReservedTokens);
      // Coarse values so that ties and exact threshold hits occur.
      p.confidence.push_back(rng.below(4) == 0 ? Scalar(rng.below(21)) / Scalar(20)
                                               : static_cast<Scalar>(rng.uniform()));
    }
    double a1 = rng.uniform(), a2 = rng.uniform();
    if (a1 > a2) std::swap(a1, a2);
    DecodeConfig c1, c2;
    c1.alpha = a1;
    c2.alpha = a2;
    const auto m1 = select_mask_positions(p, c1);
    const auto m2 = select_mask_positions(p, c2);
    subset_failures += !std::includes(m2.begin(), m2.end(), m1.begin(), m1.end());
  }

  Outcome o;
  o.pass = mismatches == 0 && cli_identical && subset_failures == 0;
  o.detail = std::to_string(mismatches) + "/" + std::to_string(sentences) +
             " alpha=0 outputs differ from the potential translation; translate --alpha 0 " +
             (cli_identical ? "matches" : "DIFFERS FROM") + " --potential; " +
             std::to_string(subset_failures) + "/1000 monotonicity violations";
  return o;
}

Outcome overfit() {
  Stopwatch sw;
  const TaskData d = make_task(SyntheticTask::kReverse, 10, 32, 1, 1, 5, 16, 3, 8);
  ModelConfig c = nat_model(d.vocab.size(), 2, 1);
  c.d_model = 32;
  c.ffn_dim = 64;
  c.max_len = 16;
  c.dropout = 0;
  c.length_offset_limit = 4;
  RunConfig r = run_config(c, 2000, 3);
  r.train.label_smoothing = 0;
  r.train.warmup_steps = 100;
  r.train.batch_tokens = 4096;  // the whole corpus in every batch
  const ParameterStore params = train(r, d.train, "overfit");

  // Losses re-measured on the full corpus, averaged over mask draws.
  const Batch batch = make_batch(d.train);
  LossBundle mean;
  Rng rng(99);
  const int draws = 20;
  for (int i = 0; i < draws; ++i) {
    Tape tape(false);
    ForwardContext ctx{tape, params, c};
    const LossBundle v = build_losses(ctx, batch, r.train, rng, 0).values;
    mean.pot += v.pot / draws;
    mean.mlm += v.mlm / draws;
  }
  const Decoder decoder(c, params);
  const CorpusDecode out = decode_sources(decoder, sources(d.train), DecodeConfig{});
  std::size_t exact = 0;
  for (std::size_t i = 0; i < d.train.size(); ++i) exact += out.final[i] == d.train[i].target;
  const double seconds = sw.seconds();
  Outcome o;
  o.pass = exact == d.train.size() && mean.pot < 0.1 && mean.mlm < 0.1 && seconds < 300;
  o.detail = "exact match " + std::to_string(exact) + "/" + std::to_string(d.train.size()) + ", L_pot " +
             fmt("%.4f", mean.pot) + ", L_mlm " + fmt("%.4f", mean.mlm) + " after 2000 steps, " +
             fmt("%.1f", seconds) + " s";
  return o;
}

struct NoisySortModel {
  TaskData data;
  ModelConfig config;
  ParameterStore params;
  ModelConfig teacher_config;
  ParameterStore teacher;
  double alpha = 0;
  double seconds = 0;
};

NoisySortModel noisy_sort_model() {
  Stopwatch sw;
  NoisySortModel m;
  m.data = make_task(SyntheticTask::kNoisySort, 50, 10000, 500, 1000, 11, 32);
  const std::size_t v = m.data.vocab.size();

  ModelConfig tc = nat_model(v, 2, 0);
  tc.kind = ModelKind::kTeacher;
  tc.dropout = 0;
  RunConfig tr = run_config(tc, 3000, 5);
  tr.train.label_smoothing = 0;
  m.teacher_config = tc;
  m.teacher = train(tr, m.data.train, "teacher");
  DistillReport report;
  const auto distilled = distill(m.data.train, m.teacher, tc, 5, &report);
  note("distilled " + std::to_string(report.replaced) + " kept " + std::to_string(report.kept) + " (" +
       fmt("%.0f", sw.seconds()) + " s)");

  m.config = nat_model(v, 4, 2);
  m.params = train(run_config(m.config, 3000, 7), distilled, "renewnat");
  m.alpha = tune_alpha(Decoder(m.config, m.params), m.data.dev);
  m.seconds = sw.seconds();
  return m;
}

Outcome renewal_helps(const NoisySortModel& m) {
  Stopwatch sw;
  const AlphaRow r = evaluate_at(Decoder(m.config, m.params), m.data.test, m.alpha);
  const double seconds = m.seconds + sw.seconds();
  Outcome o;
  o.pass = r.bleu >= r.potential_bleu + 1.0 && r.repetition <= r.potential_repetition && seconds < 1800;
  o.detail = "test BLEU final " + format_bleu(r.bleu) + " vs potential " + format_bleu(r.potential_bleu) +
             " at dev alpha " + fmt("%.2f", m.alpha) + "; repetition " + fmt("%.4f", r.repetition) +
             " vs " + fmt("%.4f", r.potential_repetition) + "; " + fmt("%.0f", seconds) + " s";
  return o;
}

Outcome npd_helps(const NoisySortModel& m) {
  Decoder decoder(m.config, m.params);
  decoder.set_teacher(&m.teacher_config, &m.teacher);
  const auto src = sources(m.data.test);
  const auto ref = targets(m.data.test);
  DecodeConfig c;
  c.alpha = m.alpha;
  const double single = sequence_bleu(decode_sources(decoder, src, c).final, ref);
  c.length_beam = 5;
  const double self = sequence_bleu(decode_sources(decoder, src, c).final, ref);
  c.scoring = NpdScoring::kTeacher;
  const double teacher = sequence_bleu(decode_sources(decoder, src, c).final, ref);

  // m = 1 against the single-length path assembled by hand.
  c = DecodeConfig{};
  c.alpha = m.alpha;
  std::size_t differ = 0;
  for (const auto& s : src) {
    const DecodeResult a = decoder.decode(s, c);
    auto session = decoder.start(s);
    decoder.propose(session, decoder.candidate_lengths(session, c).front());
    const DecodeResult b = decoder.renew(session, select_mask_positions(session.potential(), c));
    differ += a.tokens != b.tokens || a.potential != b.potential || a.renewed != b.renewed ||
              a.candidate_scores != b.candidate_scores;
  }
  Outcome o;
  o.pass = teacher >= single && differ == 0;
  o.detail = "BLEU m=5 teacher-scored " + format_bleu(teacher) + " vs single " + format_bleu(single) +
             " (self-scored m=5 " + format_bleu(self) + "); m=1 differs on " + std::to_string(differ) + "/" +
             std::to_string(src.size()) + " sentences";
  return o;
}

// Mean test BLEU over two initialisation seeds per K.
Outcome k_sweep() {
  Stopwatch sw;
  const TaskData d = make_task(SyntheticTask::kReverse, 50, 5000, 300, 500, 21, 32, 5, 25);
  const std::size_t ks[2] = {2, 4};
  const std::uint64_t seeds[2] = {13, 14};
  double mean[2] = {0, 0}, potential[2] = {0, 0};
  std::string runs;
  for (int i = 0; i < 2; ++i) {
    const ModelConfig c = nat_model(d.vocab.size(), 6, ks[i]);
    for (std::uint64_t seed : seeds) {
      const std::string label = "K=" + std::to_string(ks[i]) + " seed " + std::to_string(seed);
      const ParameterStore p = train(run_config(c, 2000, seed), d.train, label);
      const Decoder decoder(c, p);
      const AlphaRow r = evaluate_at(decoder, d.test, tune_alpha(decoder, d.dev));
      mean[i] += r.bleu / 2;
      potential[i] += r.potential_bleu / 2;
      runs += (runs.empty() ? "" : ", ") + label + " " + format_bleu(r.bleu);
    }
  }
  Outcome o;
  o.pass = mean[0] >= mean[1];
  o.detail = "N=6 reversal mean BLEU K=2 " + format_bleu(mean[0]) + " vs K=4 " + format_bleu(mean[1]) + " (" +
             runs + "; potential " + format_bleu(potential[0]) + " vs " + format_bleu(potential[1]) + "); " +
             fmt("%.0f", sw.seconds()) + " s";
  return o;
}

Outcome latency() {
  const std::size_t v = 60, len = 50, runs = 50;
  auto model = [&](std::size_t k) {
    ModelConfig c = nat_model(v, 6, k);
    c.d_model = 128;
    c.ffn_dim = 512;
    c.max_len = 64;
    c.dropout = 0;
    return c;
  };
  Rng rng(8);
  std::vector<Sequence> inputs(runs + 10);
  for (auto& s : inputs) {
    s.resize(len);
    for (auto& x : s) x = static_cast<TokenId>(kReservedTokens + rng.below(v - kReservedTokens));
  }
  // Every position below alpha = 1 is renewed, so the MLM pass always runs.
  DecodeConfig dc;
  dc.alpha = 1.0;
  dc.forced_length = len;

  const ModelConfig rc = model(2), nc = model(0);
  const ParameterStore rp = init_model(rc, 1), np = init_model(nc, 2);
  const Decoder renew(rc, rp), mono(nc, np);
  std::size_t mlm_passes = 0;
  const auto t_renew =
      measure_latency([&](std::size_t i) { mlm_passes += renew.decode(inputs[i], dc).mlm_passes; }, runs);
  const auto t_mono = measure_latency([&](std::size_t i) { mono.decode(inputs[i], dc); }, runs);

  ModelConfig tc = model(0);
  tc.kind = ModelKind::kTeacher;
  ParameterStore tp = init_model(tc, 3);
  // Suppress EOS so that every hypothesis runs to the full length.
  auto& ln_g = tp.at("dec.final_ln.g").value;
  auto& ln_b = tp.at("dec.final_ln.b").value;
  auto& out = tp.at("ar.out.w").value;
  ln_g[0] = 0;
  ln_b[0] = 10;
  for (std::size_t j = 0; j < out.cols(); ++j) out.at(0, j) = 0;
  out.at(0, kEosId) = -100;
  std::size_t teacher_tokens = 0;
  const auto t_teacher = measure_latency(
      [&](std::size_t i) { teacher_tokens = teacher_beam_search(tp, tc, inputs[i], 5, len).tokens.size(); },
      10, 2);

  const double overhead = t_renew.mean_seconds / t_mono.mean_seconds;
  const double speedup = t_teacher.mean_seconds / t_renew.mean_seconds;
  Outcome o;
  o.pass = overhead <= 1.15 && speedup >= 3.0 && teacher_tokens == len && mlm_passes > 0;
  o.detail = "RenewNAT " + fmt("%.2f", 1e3 * t_renew.mean_seconds) + " ms vs monolithic NAT " +
             fmt("%.2f", 1e3 * t_mono.mean_seconds) + " ms (x" + fmt("%.3f", overhead) +
             "); AR beam-5 " + fmt("%.1f", 1e3 * t_teacher.mean_seconds) + " ms (NAT x" +
             fmt("%.1f", speedup) + " faster); " + hardware_fingerprint();
  return o;
}

Outcome bleu_fixtures() {
  bool ok = true;
  std::string detail;
  const auto fixtures = oracle::bleu_fixtures();
  for (std::size_t i = 0; i < fixtures.size(); ++i) {
    std::vector<Tokens> hyp, ref;
    for (const auto& [h, r] : fixtures[i].pairs) {
      hyp.push_back(split_whitespace(h));
      ref.push_back(split_whitespace(r));
    }
    const double score = bleu(hyp, ref);
    ok &= std::abs(score - oracle::kBleuFixtureScores[i]) <= 0.01 &&
          std::abs(score - fixtures[i].expected()) <= 0.01;
    detail += std::string(fixtures[i].name) + " " + fmt("%.4f", score) + ", ";
  }
  const std::vector<Tokens> same{split_whitespace("a b c d e"), split_whitespace("f g h i")};
  const double identity = bleu(same, same);
  ok &= format_bleu(identity) == "100.00";
  const BleuStats clipped = bleu_stats(split_whitespace("the the the the"), split_whitespace("the cat"));
  ok &= clipped.matches[0] == 1 && clipped.totals[0] == 4 && clipped.precision(1) == 0.25;
  Outcome o;
  o.pass = ok;
  o.detail = detail + "identity " + format_bleu(identity) + ", clipped 1-gram precision " +
             fmt("%.4f", clipped.precision(1));
  return o;
}

Outcome determinism(const fs::path& scratch) {
  const fs::path dir = scratch / "determinism";
  fs::create_directories(dir);
  const std::string data = (dir / "data").string();
  if (cli({"make-data", "--task", "noisy_sort", "--out", data, "--vocab", "30", "--train", "400", "--valid",
           "20", "--test", "20", "--seed", "6"}) != kExitOk) {
    return {false, "make-data failed"};
  }
  std::ofstream(dir / "run.cfg") << "d_model = 32\nn_heads = 4\nffn_dim = 64\nenc_layers = 2\n"
                                    "dec_layers = 4\nmlm_layers = 2\nmax_len = 32\ndropout = 0.1\n"
                                    "glancing = true\nbatch_tokens = 512\nsteps = 200\nlog_every = 0\n";
  std::string logs[2];
  std::uint32_t crcs[2] = {0, 1};
  for (int i = 0; i < 2; ++i) {
    const std::string out = (dir / ("run" + std::to_string(i) + ".rnat")).string();
    if (cli({"train", "--config", (dir / "run.cfg").string(), "--data", data, "--out", out, "--seed", "17"}) !=
        kExitOk) {
      return {false, "train failed"};
    }
    logs[i] = slurp(out + ".log");
    crcs[i] = checkpoint_crc(out);
  }
  const auto lines = static_cast<std::size_t>(std::count(logs[0].begin(), logs[0].end(), '\n'));
  Outcome o;
  o.pass = logs[0] == logs[1] && crcs[0] == crcs[1] && lines == 201;
  char crc[16];
  std::snprintf(crc, sizeof crc, "%08x", crcs[0]);
  o.detail = std::string("loss logs ") + (logs[0] == logs[1] ? "identical" : "DIFFER") + " (" +
             std::to_string(lines) + " lines); checkpoint CRC " + crc +
             (crcs[0] == crcs[1] ? " on both runs" : " vs a different CRC");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RenewNAT acceptance suite"};
  std::vector<int> only;
  std::string scratch = (fs::temp_directory_path() / "renewnat_acceptance").string();
  app.add_option("--only", only, "Run only these criteria (1-10)")->check(CLI::Range(1, 10));
  app.add_option("--scratch", scratch, "Directory for temporary files");
  app.add_flag("-v,--verbose", g_verbose, "Progress on stderr");
  CLI11_PARSE(app, argc, argv);
  fs::remove_all(scratch);
  fs::create_directories(scratch);

  auto wanted = [&](int c) { return only.empty() || std::find(only.begin(), only.end(), c) != only.end(); };
  std::optional<NoisySortModel> noisy;
  auto noisy_model = [&]() -> const NoisySortModel& {
    if (!noisy) noisy = noisy_sort_model();
    return *noisy;
  };

  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"gradient check on a toy RenewNAT", gradient_check},
      {"masked-loss isolation", masked_loss_isolation},
      {"alpha=0 identity and alpha monotonicity", [&] { return alpha_zero_identity(scratch); }},
      {"overfit 32 pairs", overfit},
      {"renewal beats the potential translation on noisy_sort", [&] { return renewal_helps(noisy_model()); }},
      {"noisy parallel decoding", [&] { return npd_helps(noisy_model()); }},
      {"K sweep at N=6 on reversal", k_sweep},
      {"single-pass latency", latency},
      {"BLEU fixtures", bleu_fixtures},
      {"training determinism", [&] { return determinism(scratch); }},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    if (!wanted(id)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << "criterion " << id << " " << (o.pass ? "PASS" : "FAIL") << " " << criteria[i].first << ": "
              << o.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
