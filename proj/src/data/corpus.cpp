// Copyright 2026 The renewnat Authors.
// SPDX-License-Identifier: Apache-2.0

#include "renewnat/data/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

RENEWNAT_NAMESPACE_BEGIN

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

void write_lines(const std::filesystem::path& path, const std::vector<std::string>& lines) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& line : lines) out << line << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

ParallelText read_parallel(const std::filesystem::path& dir, std::string_view name) {
  ParallelText text;
  const std::string base(name);
  text.source = read_lines(dir / (base + ".src"));
  text.target = read_lines(dir / (base + ".tgt"));
  if (text.source.size() != text.target.size()) {
    throw IoError((dir / base).string() + ": " + std::to_string(text.source.size()) +
                  " source lines but " + std::to_string(text.target.size()) + " target lines");
  }
  return text;
}

void write_parallel(const ParallelText& text, const std::filesystem::path& dir, std::string_view name) {
  std::filesystem::create_directories(dir);
  const std::string base(name);
  write_lines(dir / (base + ".src"), text.source);
  write_lines(dir / (base + ".tgt"), text.target);
}

std::vector<SentencePair> encode_corpus(const ParallelText& text, const Vocabulary& vocab,
                                        std::size_t max_len) {
  std::vector<SentencePair> pairs;
  pairs.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    SentencePair p{vocab.encode(text.source[i]), vocab.encode(text.target[i])};
    if (p.source.empty() || p.target.empty()) {
      throw LengthError("line " + std::to_string(i + 1) + ": empty sentence");
    }
    if (p.source.size() + 1 > max_len || p.target.size() > max_len) {
      throw LengthError("line " + std::to_string(i + 1) + ": sentence exceeds max_len " +
                        std::to_string(max_len));
    }
    pairs.push_back(std::move(p));
  }
  return pairs;
}

ParallelText decode_corpus(const std::vector<SentencePair>& pairs, const Vocabulary& vocab) {
  ParallelText text;
  for (const auto& p : pairs) {
    text.source.push_back(vocab.decode(p.source));
    text.target.push_back(vocab.decode(p.target));
  }
  return text;
}

std::string_view to_string(SyntheticTask task) {
  switch (task) {
    case SyntheticTask::kCopy: return "copy";
    case SyntheticTask::kReverse: return "reverse";
    case SyntheticTask::kNoisySort: return "noisy_sort";
  }
  return "copy";
}

SyntheticTask parse_synthetic_task(std::string_view text) {
  if (text == "copy") return SyntheticTask::kCopy;
  if (text == "reverse") return SyntheticTask::kReverse;
  if (text == "noisy_sort") return SyntheticTask::kNoisySort;
  throw ConfigError("unknown synthetic task: " + std::string(text));
}

namespace {

std::string join(const std::vector<std::size_t>& symbols) {
  std::string out;
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(symbols[i]);
  }
  return out;
}

}  // namespace

ParallelText make_synthetic(const SyntheticSpec& spec) {
  if (spec.vocab_size < 10) throw ConfigError("make_synthetic: vocab_size must be >= 10");
  if (spec.min_len == 0 || spec.min_len > spec.max_len) {
    throw ConfigError("make_synthetic: invalid length range");
  }
  Rng rng(spec.seed);
  ParallelText text;
  for (std::size_t n = 0; n < spec.count; ++n) {
    const std::size_t len = spec.min_len + rng.below(spec.max_len - spec.min_len + 1);
    std::vector<std::size_t> x(len);
    for (auto& s : x) s = rng.below(spec.vocab_size);
    std::vector<std::size_t> y;
    switch (spec.task) {
      case SyntheticTask::kCopy:
        y = x;
        break;
      case SyntheticTask::kReverse:
        y.assign(x.rbegin(), x.rend());
        break;
      case SyntheticTask::kNoisySort: {
        std::vector<std::size_t> sorted = x;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < sorted.size(); ++i) {
          const bool repeat = i > 0 && sorted[i] == sorted[i - 1];
          if (repeat && rng.bernoulli(0.5)) continue;
          y.push_back(sorted[i]);
        }
        break;
      }
    }
    text.source.push_back(join(x));
    text.target.push_back(join(y));
  }
  return text;
}

std::vector<std::vector<std::size_t>> plan_batches(const std::vector<SentencePair>& pairs,
                                                   std::size_t max_tokens, Rng& rng) {
  if (max_tokens == 0) throw ConfigError("plan_batches: max_tokens must be positive");
  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto ka = std::make_pair(pairs[a].source.size(), pairs[a].target.size());
    const auto kb = std::make_pair(pairs[b].source.size(), pairs[b].target.size());
    return ka < kb;
  });

  std::vector<std::vector<std::size_t>> batches;
  std::vector<std::size_t> current;
  std::size_t max_src = 0;
  std::size_t max_tgt = 0;
  for (std::size_t idx : order) {
    const std::size_t s = std::max(max_src, pairs[idx].source.size() + 1);
    const std::size_t t = std::max(max_tgt, pairs[idx].target.size());
    if (!current.empty() && (current.size() + 1) * (s + t) > max_tokens) {
      batches.push_back(std::move(current));
      current.clear();
      max_src = max_tgt = 0;
    }
    current.push_back(idx);
    max_src = std::max(max_src, pairs[idx].source.size() + 1);
    max_tgt = std::max(max_tgt, pairs[idx].target.size());
  }
  if (!current.empty()) batches.push_back(std::move(current));
  rng.shuffle(batches);
  return batches;
}

std::vector<Batch> make_batches(const std::vector<SentencePair>& pairs, std::size_t max_tokens,
                                Rng& rng) {
  std::vector<Batch> out;
  for (const auto& plan : plan_batches(pairs, max_tokens, rng)) {
    std::vector<SentencePair> chunk;
    chunk.reserve(plan.size());
    for (std::size_t i : plan) chunk.push_back(pairs[i]);
    out.push_back(make_batch(chunk));
  }
  return out;
}

RENEWNAT_NAMESPACE_END
