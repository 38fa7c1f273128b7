// Copyright 2026 The renewnat Authors.
// SPDX-License-Identifier: Apache-2.0

#include "renewnat/eval/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

#include "renewnat/data/corpus.hpp"
#include "renewnat/data/distill.hpp"
#include "renewnat/eval/checkpoint.hpp"
#include "renewnat/eval/experiments.hpp"

RENEWNAT_NAMESPACE_BEGIN

namespace {

namespace fs = std::filesystem;

class UsageError : public Error {
 public:
  using Error::Error;
};

std::string fmt(double v, const char* spec = "%.6f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

std::vector<Sequence> encode_lines(const std::vector<std::string>& lines, const Vocabulary& vocab) {
  std::vector<Sequence> out;
  out.reserve(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    out.push_back(vocab.encode(lines[i]));
    if (out.back().empty()) throw LengthError("line " + std::to_string(i + 1) + ": empty sentence");
  }
  return out;
}

std::vector<std::string> decode_lines(const std::vector<Sequence>& seqs, const Vocabulary& vocab) {
  std::vector<std::string> out;
  out.reserve(seqs.size());
  for (const auto& s : seqs) out.push_back(vocab.decode(s));
  return out;
}

// --- train ---------------------------------------------------------------------

struct TrainArgs {
  std::string config;
  std::string data;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> steps;
  bool glancing = false;
  std::optional<std::string> mlm_input;
};

ModelBundle train_bundle(RunConfig config, const fs::path& data_dir, std::ostream& log,
                         std::ostream& err) {
  const ParallelText text = read_parallel(data_dir, "train");
  std::vector<std::string> lines = text.source;
  lines.insert(lines.end(), text.target.begin(), text.target.end());
  Vocabulary vocab = Vocabulary::build(lines, config.min_count);
  config.model.vocab_size = vocab.size();
  config.model.validate();
  config.train.validate();
  if (config.train.total_steps == 0) config.train.total_steps = config.steps;
  const auto pairs = encode_corpus(text, vocab, config.model.max_len);

  ParameterStore params = init_model(config.model, config.seed);
  log << kTrainLogHeader << '\n';
  train_model(config, pairs, params, [&](const TrainLogEntry& e) {
    log << format_log_entry(e) << '\n';
    if (config.log_every && e.step % config.log_every == 0) {
      err << "step " << e.step << " loss " << fmt(e.loss.total, "%.4f") << '\n';
    }
  });
  return ModelBundle{config, std::move(vocab), std::move(params)};
}

int cmd_train(const TrainArgs& a, std::ostream& out, std::ostream& err) {
  RunConfig config = load_run_config(a.config);
  if (a.seed) config.seed = *a.seed;
  if (a.steps) config.steps = *a.steps;
  if (a.glancing) config.train.glancing = true;
  if (a.mlm_input) config.train.mlm_input = parse_mlm_input_strategy(*a.mlm_input);
  std::ofstream log = open_out(a.out + ".log");
  ModelBundle bundle = train_bundle(config, a.data, log, err);
  save_bundle(a.out, bundle);
  out << "trained " << to_string(bundle.config.model.kind) << " for " << bundle.config.steps
      << " steps; checkpoint " << a.out << " crc " << checkpoint_crc(a.out) << '\n';
  return kExitOk;
}

// --- distill ---------------------------------------------------------------------

struct DistillArgs {
  std::string teacher;
  std::string data;
  std::string out;
  std::size_t beam = 5;
};

int cmd_distill(const DistillArgs& a, std::ostream& out, std::ostream& err) {
  const ModelBundle teacher = load_bundle(a.teacher);
  if (teacher.config.model.kind != ModelKind::kTeacher) {
    throw UsageError(a.teacher + " is not an autoregressive teacher checkpoint");
  }
  const ParallelText raw = read_parallel(a.data, "train");
  std::vector<SentencePair> pairs;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    pairs.push_back({teacher.vocab.encode(raw.source[i]), teacher.vocab.encode(raw.target[i])});
  }
  DistillReport report;
  const auto distilled = distill(pairs, teacher.params, teacher.config.model, a.beam, &report);
  ParallelText text;
  text.source = raw.source;
  for (const auto& p : distilled) text.target.push_back(teacher.vocab.decode(p.target));
  // Kept lines retain their original text (unknown words included).
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (distilled[i].target == pairs[i].target) text.target[i] = raw.target[i];
  }
  write_parallel(text, a.out, "train");
  for (const auto& entry : fs::directory_iterator(a.data)) {
    const auto name = entry.path().filename().string();
    if (name == "train.src" || name == "train.tgt") continue;
    const auto ext = entry.path().extension();
    if (entry.is_regular_file() && (ext == ".src" || ext == ".tgt")) {
      fs::copy_file(entry.path(), fs::path(a.out) / name, fs::copy_options::overwrite_existing);
    }
  }
  for (const auto& w : report.warnings) err << "warning: " << w << '\n';
  out << "distilled " << distilled.size() << " pairs (" << report.replaced << " replaced, "
      << report.kept << " kept)\n";
  return kExitOk;
}

// --- translate -------------------------------------------------------------------

struct TranslateArgs {
  std::string ckpt;
  std::string input;
  std::string out;
  std::optional<double> alpha;
  std::optional<std::size_t> npd;
  std::optional<std::string> mode;
  std::optional<double> delta;
  std::optional<std::string> potential;
  std::optional<std::string> teacher;
  std::optional<std::string> npd_scoring;
  std::optional<std::size_t> beam;
};

DecodeConfig decode_config_from(const RunConfig& base, const std::optional<double>& alpha,
                                const std::optional<std::size_t>& npd,
                                const std::optional<std::string>& mode,
                                const std::optional<double>& delta,
                                const std::optional<std::string>& scoring) {
  DecodeConfig c = base.decode;
  if (alpha) c.alpha = *alpha;
  if (npd) c.length_beam = *npd;
  if (mode) c.mode = parse_distinguish_mode(*mode);
  if (delta) c.delta = *delta;
  if (scoring) c.scoring = parse_npd_scoring(*scoring);
  c.validate();
  return c;
}

int cmd_translate(const TranslateArgs& a, std::ostream& out, std::ostream& err) {
  const ModelBundle bundle = load_bundle(a.ckpt);
  const auto sources = encode_lines(read_lines(a.input), bundle.vocab);
  if (bundle.config.model.kind == ModelKind::kTeacher) {
    const std::size_t beam = a.beam.value_or(bundle.config.beam);
    std::vector<std::string> lines;
    for (std::size_t i = 0; i < sources.size(); ++i) {
      BeamResult r = teacher_beam_search(bundle.params, bundle.config.model, sources[i], beam,
                                         bundle.config.model.max_len);
      if (!r.finished) err << "warning: line " << i + 1 << ": no [EOS] within max_len; truncated\n";
      lines.push_back(bundle.vocab.decode(r.tokens));
    }
    write_lines(a.out, lines);
    out << "translated " << lines.size() << " lines with beam " << beam << '\n';
    return kExitOk;
  }

  const DecodeConfig config =
      decode_config_from(bundle.config, a.alpha, a.npd, a.mode, a.delta, a.npd_scoring);
  Decoder decoder(bundle.config.model, bundle.params);
  std::optional<ModelBundle> teacher;
  if (a.teacher) {
    teacher = load_bundle(*a.teacher);
    if (teacher->config.model.kind != ModelKind::kTeacher) throw UsageError(*a.teacher + " is not a teacher");
    if (!(teacher->vocab == bundle.vocab)) throw UsageError("teacher and model vocabularies differ");
    decoder.set_teacher(&teacher->config.model, &teacher->params);
  }
  const CorpusDecode result = decode_sources(decoder, sources, config);
  write_lines(a.out, decode_lines(result.final, bundle.vocab));
  if (a.potential) write_lines(*a.potential, decode_lines(result.potential, bundle.vocab));
  std::size_t masked = 0;
  for (auto m : result.masked) masked += m;
  out << "translated " << sources.size() << " lines; renewed " << masked << " tokens; "
      << fmt(result.seconds, "%.3f") << " s\n";
  return kExitOk;
}

// --- evaluate --------------------------------------------------------------------

struct EvaluateArgs {
  std::string hyp;
  std::string ref;
  std::optional<std::string> src;
  bool buckets = false;
};

std::vector<Tokens> tokenize_lines(const std::vector<std::string>& lines) {
  std::vector<Tokens> out;
  for (const auto& l : lines) out.push_back(split_whitespace(l));
  return out;
}

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out, std::ostream&) {
  const auto hyp = tokenize_lines(read_lines(a.hyp));
  const auto ref = tokenize_lines(read_lines(a.ref));
  if (hyp.size() != ref.size()) {
    throw UsageError(std::to_string(hyp.size()) + " hypotheses but " + std::to_string(ref.size()) +
                     " references");
  }
  const std::string n = std::to_string(hyp.size());
  out << "metric,sentences,value\n";
  out << "bleu," << n << ',' << format_bleu(bleu(hyp, ref)) << '\n';
  out << "repetition_ratio," << n << ',' << fmt(repetition_ratio(hyp)) << '\n';
  if (a.buckets) {
    std::vector<std::size_t> lengths;
    if (a.src) {
      const auto src = tokenize_lines(read_lines(*a.src));
      if (src.size() != hyp.size()) throw UsageError("--src line count differs from --hyp");
      for (const auto& s : src) lengths.push_back(s.size());
    } else {
      for (const auto& r : ref) lengths.push_back(r.size());
    }
    for (const auto& b : bucket_bleu(hyp, ref, lengths)) {
      out << "bleu" << b.label << ',' << b.count << ',' << format_bleu(b.bleu) << '\n';
    }
  }
  return kExitOk;
}

// --- ablations -------------------------------------------------------------------

struct AblateAlphaArgs {
  std::string ckpt;
  std::string data;
  std::string grid = "0:1:0.1";
  std::string out;
  std::string split = "test";
  std::string mode = "threshold";
};

int cmd_ablate_alpha(const AblateAlphaArgs& a, std::ostream& out, std::ostream&) {
  const ModelBundle bundle = load_bundle(a.ckpt);
  if (bundle.config.model.kind != ModelKind::kRenewNat) throw UsageError("ablate-alpha needs a RenewNAT checkpoint");
  const ParallelText text = read_parallel(a.data, a.split);
  const auto sources = encode_lines(text.source, bundle.vocab);
  const auto refs = encode_lines(text.target, bundle.vocab);
  DecodeConfig base = bundle.config.decode;
  base.mode = parse_distinguish_mode(a.mode);
  Decoder decoder(bundle.config.model, bundle.params);
  const auto rows = sweep_alpha(decoder, sources, refs, parse_grid(a.grid), base);
  std::ofstream csv = open_out(a.out);
  csv << (base.mode == DistinguishMode::kThreshold ? "alpha" : "delta")
      << ",bleu,potential_bleu,repetition,potential_repetition,mask_fraction\n";
  for (const auto& r : rows) {
    csv << fmt(r.alpha, "%.2f") << ',' << format_bleu(r.bleu) << ',' << format_bleu(r.potential_bleu) << ','
        << fmt(r.repetition) << ',' << fmt(r.potential_repetition) << ',' << fmt(r.mask_fraction) << '\n';
  }
  out << "wrote " << rows.size() << " rows to " << a.out << '\n';
  return kExitOk;
}

struct AblateTrainArgs {
  std::string config;
  std::string data;
  std::string out;
  std::string split = "test";
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> steps;
  std::vector<std::size_t> ks{2, 3, 4};
};

struct Scored {
  double bleu = 0;
  double potential_bleu = 0;
  double repetition = 0;
};

Scored train_and_score(const RunConfig& config, const fs::path& data_dir, const std::string& split,
                       std::ostream& err) {
  std::ostringstream sink;
  const ModelBundle bundle = train_bundle(config, data_dir, sink, err);
  const ParallelText text = read_parallel(data_dir, split);
  const auto sources = encode_lines(text.source, bundle.vocab);
  const auto refs = encode_lines(text.target, bundle.vocab);
  Decoder decoder(bundle.config.model, bundle.params);
  const CorpusDecode result = decode_sources(decoder, sources, bundle.config.decode);
  return {sequence_bleu(result.final, refs), sequence_bleu(result.potential, refs),
          sequence_repetition(result.final)};
}

RunConfig ablation_base(const AblateTrainArgs& a) {
  RunConfig config = load_run_config(a.config);
  if (config.model.kind != ModelKind::kRenewNat) throw UsageError("ablations need model = renewnat");
  if (a.seed) config.seed = *a.seed;
  if (a.steps) config.steps = *a.steps;
  return config;
}

int cmd_ablate_k(const AblateTrainArgs& a, std::ostream& out, std::ostream& err) {
  const RunConfig base = ablation_base(a);
  std::ofstream csv = open_out(a.out);
  csv << "k,n,bleu,potential_bleu,repetition\n";
  for (std::size_t k : a.ks) {
    RunConfig c = base;
    c.model.mlm_layers = k;
    const Scored s = train_and_score(c, a.data, a.split, err);
    csv << k << ',' << c.model.dec_layers << ',' << format_bleu(s.bleu) << ','
        << format_bleu(s.potential_bleu) << ',' << fmt(s.repetition) << '\n';
    csv.flush();
  }
  out << "wrote " << a.ks.size() << " rows to " << a.out << '\n';
  return kExitOk;
}

int cmd_ablate_strategy(const AblateTrainArgs& a, std::ostream& out, std::ostream& err) {
  const RunConfig base = ablation_base(a);
  std::ofstream csv = open_out(a.out);
  csv << "mlm_input,bleu,potential_bleu,repetition\n";
  const MlmInputStrategy strategies[] = {MlmInputStrategy::kTarget, MlmInputStrategy::kOutput,
                                         MlmInputStrategy::kMixed};
  for (auto strategy : strategies) {
    RunConfig c = base;
    c.train.mlm_input = strategy;
    const Scored s = train_and_score(c, a.data, a.split, err);
    csv << to_string(strategy) << ',' << format_bleu(s.bleu) << ',' << format_bleu(s.potential_bleu)
        << ',' << fmt(s.repetition) << '\n';
    csv.flush();
  }
  out << "wrote 3 rows to " << a.out << '\n';
  return kExitOk;
}

// --- bench -----------------------------------------------------------------------

struct BenchArgs {
  std::string ckpt;
  std::string baseline;
  std::string data;
  std::string out;
  std::string split = "test";
  std::size_t sentences = 100;
  std::size_t warmup = 10;
  std::optional<std::size_t> length;
  std::size_t beam = 5;
};

struct BenchRow {
  std::string name;
  std::string kind;
  LatencyStats stats;
};

BenchRow bench_one(const std::string& path, const std::vector<std::string>& lines, const BenchArgs& a) {
  const ModelBundle bundle = load_bundle(path);
  const auto sources = encode_lines(lines, bundle.vocab);
  BenchRow row;
  row.name = path;
  if (bundle.config.model.kind == ModelKind::kTeacher) {
    row.kind = "teacher-beam" + std::to_string(a.beam);
    const std::size_t cap = a.length.value_or(bundle.config.model.max_len);
    row.stats = measure_latency(
        [&](std::size_t i) {
          teacher_beam_search(bundle.params, bundle.config.model, sources[i], a.beam, cap);
        },
        sources.size(), a.warmup);
  } else {
    row.kind = bundle.config.model.has_mlm() ? "renewnat" : "nat";
    Decoder decoder(bundle.config.model, bundle.params);
    DecodeConfig config = bundle.config.decode;
    config.forced_length = a.length;
    row.stats = measure_latency([&](std::size_t i) { decoder.decode(sources[i], config); },
                                sources.size(), a.warmup);
  }
  return row;
}

int cmd_bench(const BenchArgs& a, std::ostream& out, std::ostream&) {
  auto lines = read_parallel(a.data, a.split).source;
  if (lines.empty()) throw UsageError("no sentences in split " + a.split);
  if (lines.size() > a.sentences) lines.resize(a.sentences);
  const BenchRow model = bench_one(a.ckpt, lines, a);
  const BenchRow baseline = bench_one(a.baseline, lines, a);
  const std::string hw = hardware_fingerprint();
  std::ofstream csv = open_out(a.out);
  csv << "model,kind,sentences,warmup,mean_ms,stddev_ms,speedup_vs_baseline,hardware\n";
  for (const BenchRow* r : {&model, &baseline}) {
    const double speedup = baseline.stats.mean_seconds / r->stats.mean_seconds;
    std::string quoted_hw = hw;
    std::replace(quoted_hw.begin(), quoted_hw.end(), ',', ';');
    csv << r->name << ',' << r->kind << ',' << r->stats.runs << ',' << r->stats.warmup << ','
        << fmt(r->stats.mean_seconds * 1e3, "%.4f") << ',' << fmt(r->stats.stddev_seconds * 1e3, "%.4f") << ','
        << fmt(speedup, "%.3f") << ',' << quoted_hw << '\n';
  }
  out << "speedup " << fmt(baseline.stats.mean_seconds / model.stats.mean_seconds, "%.3f") << "x over "
      << a.baseline << '\n';
  return kExitOk;
}

// --- make-data -------------------------------------------------------------------

struct MakeDataArgs {
  std::string task = "copy";
  std::string out;
  std::size_t vocab = 50;
  std::size_t min_len = 5;
  std::size_t max_len = 15;
  std::size_t train = 10000;
  std::size_t valid = 500;
  std::size_t test = 1000;
  std::uint64_t seed = 1;
};

int cmd_make_data(const MakeDataArgs& a, std::ostream& out, std::ostream&) {
  SyntheticSpec spec;
  spec.task = parse_synthetic_task(a.task);
  spec.vocab_size = a.vocab;
  spec.min_len = a.min_len;
  spec.max_len = a.max_len;
  std::uint64_t offset = 0;
  for (const auto& [split, count] : {std::pair<std::string, std::size_t>{"train", a.train},
                                     {"valid", a.valid}, {"test", a.test}}) {
    spec.count = count;
    spec.seed = a.seed * 1000003ULL + offset++;
    write_parallel(make_synthetic(spec), a.out, split);
  }
  out << "wrote " << a.task << " corpus to " << a.out << '\n';
  return kExitOk;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"RenewNAT: non-autoregressive translation with a potential-translation renewal pass",
               "renewnat"};
  app.require_subcommand(1);
  std::function<int()> action;

  TrainArgs train;
  auto* t = app.add_subcommand("train", "Train a RenewNAT model or an autoregressive teacher");
  t->add_option("--config", train.config, "Config file")->required()->check(CLI::ExistingFile);
  t->add_option("--data", train.data, "Directory with train.src/train.tgt")->required()->check(CLI::ExistingDirectory);
  t->add_option("--out", train.out, "Checkpoint path")->required();
  t->add_option("--seed", train.seed, "Random seed");
  t->add_option("--steps", train.steps, "Number of updates");
  t->add_flag("--glancing", train.glancing, "Enable glancing sampling");
  t->add_option("--mlm-input", train.mlm_input, "target|output|mixed")
      ->check(CLI::IsMember({"target", "output", "mixed"}));
  t->callback([&] { action = [&] { return cmd_train(train, out, err); }; });

  DistillArgs dist;
  auto* d = app.add_subcommand("distill", "Replace training targets with teacher beam search output");
  d->add_option("--teacher", dist.teacher, "Teacher checkpoint")->required()->check(CLI::ExistingFile);
  d->add_option("--data", dist.data, "Raw corpus directory")->required()->check(CLI::ExistingDirectory);
  d->add_option("--out", dist.out, "Output corpus directory")->required();
  d->add_option("--beam", dist.beam, "Beam size")->check(CLI::PositiveNumber);
  d->callback([&] { action = [&] { return cmd_distill(dist, out, err); }; });

  TranslateArgs tr;
  auto* x = app.add_subcommand("translate", "Decode a file of source sentences");
  x->add_option("--ckpt", tr.ckpt, "Checkpoint")->required()->check(CLI::ExistingFile);
  x->add_option("--input", tr.input, "Source file")->required()->check(CLI::ExistingFile);
  x->add_option("--out", tr.out, "Output file")->required();
  x->add_option("--alpha", tr.alpha, "Confidence threshold")->check(CLI::Range(0.0, 1.0));
  x->add_option("--npd", tr.npd, "Length beam m")->check(CLI::PositiveNumber);
  x->add_option("--mode", tr.mode, "threshold|ratio")->check(CLI::IsMember({"threshold", "ratio"}));
  x->add_option("--delta", tr.delta, "Mask ratio for ratio mode")->check(CLI::Range(0.0, 1.0));
  x->add_option("--potential", tr.potential, "Also write the potential translations here");
  x->add_option("--teacher", tr.teacher, "Teacher checkpoint for NPD reranking")->check(CLI::ExistingFile);
  x->add_option("--npd-scoring", tr.npd_scoring, "self|teacher")->check(CLI::IsMember({"self", "teacher"}));
  x->add_option("--beam", tr.beam, "Beam size when --ckpt is a teacher")->check(CLI::PositiveNumber);
  x->callback([&] { action = [&] { return cmd_translate(tr, out, err); }; });

  EvaluateArgs ev;
  auto* e = app.add_subcommand("evaluate", "Score hypotheses against references (CSV on stdout)");
  e->add_option("--hyp", ev.hyp, "Hypothesis file")->required()->check(CLI::ExistingFile);
  e->add_option("--ref", ev.ref, "Reference file")->required()->check(CLI::ExistingFile);
  e->add_option("--src", ev.src, "Source file for length buckets")->check(CLI::ExistingFile);
  e->add_flag("--buckets", ev.buckets, "Add BLEU per source-length bucket");
  e->callback([&] { action = [&] { return cmd_evaluate(ev, out, err); }; });

  AblateAlphaArgs aa;
  auto* al = app.add_subcommand("ablate-alpha", "BLEU over a grid of confidence thresholds");
  al->add_option("--ckpt", aa.ckpt, "Checkpoint")->required()->check(CLI::ExistingFile);
  al->add_option("--data", aa.data, "Corpus directory")->required()->check(CLI::ExistingDirectory);
  al->add_option("--grid", aa.grid, "lo:hi:step");
  al->add_option("--out", aa.out, "CSV path")->required();
  al->add_option("--split", aa.split, "Corpus split name");
  al->add_option("--mode", aa.mode, "threshold|ratio")->check(CLI::IsMember({"threshold", "ratio"}));
  al->callback([&] { action = [&] { return cmd_ablate_alpha(aa, out, err); }; });

  AblateTrainArgs ak;
  auto* k = app.add_subcommand("ablate-k", "Train and score one model per MLM depth K");
  k->add_option("--config", ak.config, "Config file")->required()->check(CLI::ExistingFile);
  k->add_option("--data", ak.data, "Corpus directory")->required()->check(CLI::ExistingDirectory);
  k->add_option("--out", ak.out, "CSV path")->required();
  k->add_option("--ks", ak.ks, "K values")->delimiter(',');
  k->add_option("--split", ak.split, "Evaluation split");
  k->add_option("--seed", ak.seed, "Random seed");
  k->add_option("--steps", ak.steps, "Updates per model");
  k->callback([&] { action = [&] { return cmd_ablate_k(ak, out, err); }; });

  AblateTrainArgs as;
  auto* st = app.add_subcommand("ablate-strategy", "Train and score one model per MLM input strategy");
  st->add_option("--config", as.config, "Config file")->required()->check(CLI::ExistingFile);
  st->add_option("--data", as.data, "Corpus directory")->required()->check(CLI::ExistingDirectory);
  st->add_option("--out", as.out, "CSV path")->required();
  st->add_option("--split", as.split, "Evaluation split");
  st->add_option("--seed", as.seed, "Random seed");
  st->add_option("--steps", as.steps, "Updates per model");
  st->callback([&] { action = [&] { return cmd_ablate_strategy(as, out, err); }; });

  BenchArgs bn;
  auto* b = app.add_subcommand("bench", "Batch-1 decode latency against a baseline checkpoint");
  b->add_option("--ckpt", bn.ckpt, "Checkpoint")->required()->check(CLI::ExistingFile);
  b->add_option("--baseline", bn.baseline, "Baseline checkpoint")->required()->check(CLI::ExistingFile);
  b->add_option("--data", bn.data, "Corpus directory")->required()->check(CLI::ExistingDirectory);
  b->add_option("--out", bn.out, "CSV path")->required();
  b->add_option("--split", bn.split, "Corpus split");
  b->add_option("--sentences", bn.sentences, "Sentences to time")->check(CLI::PositiveNumber);
  b->add_option("--warmup", bn.warmup, "Untimed warmup decodes");
  b->add_option("--length", bn.length, "Force every output to this length")->check(CLI::PositiveNumber);
  b->add_option("--beam", bn.beam, "Teacher beam size")->check(CLI::PositiveNumber);
  b->callback([&] { action = [&] { return cmd_bench(bn, out, err); }; });

  MakeDataArgs md;
  auto* m = app.add_subcommand("make-data", "Write a synthetic train/valid/test corpus");
  m->add_option("--task", md.task, "copy|reverse|noisy_sort")
      ->check(CLI::IsMember({"copy", "reverse", "noisy_sort"}));
  m->add_option("--out", md.out, "Output directory")->required();
  m->add_option("--vocab", md.vocab, "Number of symbols");
  m->add_option("--min-len", md.min_len, "Shortest source");
  m->add_option("--max-len", md.max_len, "Longest source");
  m->add_option("--train", md.train, "Training pairs");
  m->add_option("--valid", md.valid, "Development pairs");
  m->add_option("--test", md.test, "Test pairs");
  m->add_option("--seed", md.seed, "Random seed");
  m->callback([&] { action = [&] { return cmd_make_data(md, out, err); }; });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& ex) {
    std::string msg = ex.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    err << "usage error: " << msg << " (run with --help)\n";
    return kExitUsage;
  }

  try {
    return action ? action() : kExitUsage;
  } catch (const UsageError& ex) {
    err << "usage error: " << ex.what() << '\n';
    return kExitUsage;
  } catch (const IoError& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& ex) {
    err << "config error: " << ex.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitFailure;
  }
}

RENEWNAT_NAMESPACE_END
