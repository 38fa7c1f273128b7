// Copyright 2026 The renewnat Authors.
// SPDX-License-Identifier: Apache-2.0

#include "renewnat/eval/metrics.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <thread>

RENEWNAT_NAMESPACE_BEGIN

BleuStats& BleuStats::operator+=(const BleuStats& other) {
  for (std::size_t n = 0; n < 4; ++n) {
    matches[n] += other.matches[n];
    totals[n] += other.totals[n];
  }
  hyp_len += other.hyp_len;
  ref_len += other.ref_len;
  return *this;
}

double BleuStats::precision(std::size_t n) const {
  if (n < 1 || n > 4) throw Error("BLEU precision order must be in 1..4");
  const std::size_t t = totals[n - 1];
  return t == 0 ? 0.0 : static_cast<double>(matches[n - 1]) / static_cast<double>(t);
}

double BleuStats::brevity_penalty() const {
  if (hyp_len == 0) return 0.0;
  if (hyp_len > ref_len) return 1.0;
  return std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(hyp_len));
}

double BleuStats::score() const {
  double log_sum = 0;
  for (std::size_t n = 1; n <= 4; ++n) {
    const double p = precision(n);
    if (p == 0) return 0.0;
    log_sum += std::log(p);
  }
  return 100.0 * brevity_penalty() * std::exp(log_sum / 4.0);
}

namespace {

std::map<std::vector<std::string>, std::size_t> ngram_counts(const Tokens& tokens, std::size_t n) {
  std::map<std::vector<std::string>, std::size_t> counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    ++counts[std::vector<std::string>(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                                      tokens.begin() + static_cast<std::ptrdiff_t>(i + n))];
  }
  return counts;
}

}  // namespace

BleuStats bleu_stats(const Tokens& hypothesis, const Tokens& reference) {
  BleuStats s;
  s.hyp_len = hypothesis.size();
  s.ref_len = reference.size();
  for (std::size_t n = 1; n <= 4; ++n) {
    const auto hyp = ngram_counts(hypothesis, n);
    const auto ref = ngram_counts(reference, n);
    for (const auto& [gram, count] : hyp) {
      auto it = ref.find(gram);
      if (it != ref.end()) s.matches[n - 1] += std::min(count, it->second);
    }
    s.totals[n - 1] = hypothesis.size() >= n ? hypothesis.size() - n + 1 : 0;
  }
  return s;
}

double bleu(const std::vector<Tokens>& hypotheses, const std::vector<Tokens>& references) {
  if (hypotheses.empty()) throw Error("bleu: empty hypothesis set");
  if (hypotheses.size() != references.size()) {
    throw Error("bleu: " + std::to_string(hypotheses.size()) + " hypotheses but " +
                std::to_string(references.size()) + " references");
  }
  BleuStats total;
  for (std::size_t i = 0; i < hypotheses.size(); ++i) total += bleu_stats(hypotheses[i], references[i]);
  return total.score();
}

double repetition_ratio(const std::vector<Tokens>& hypotheses) {
  std::size_t tokens = 0;
  std::size_t repeats = 0;
  for (const auto& h : hypotheses) {
    tokens += h.size();
    for (std::size_t i = 1; i < h.size(); ++i) repeats += h[i] == h[i - 1];
  }
  if (tokens == 0) throw Error("repetition_ratio: empty corpus");
  return static_cast<double>(repeats) / static_cast<double>(tokens);
}

std::vector<LengthBucket> bucket_bleu(const std::vector<Tokens>& hypotheses,
                                      const std::vector<Tokens>& references,
                                      const std::vector<std::size_t>& lengths) {
  if (hypotheses.size() != references.size() || lengths.size() != hypotheses.size()) {
    throw Error("bucket_bleu: size mismatch");
  }
  std::vector<LengthBucket> buckets = {
      {"[1,10]", 0, 10}, {"(10,20]", 10, 20}, {"(20,40]", 20, 40},
      {"(40,60]", 40, 60}, {"(60,inf)", 60, std::nullopt}};
  std::vector<BleuStats> stats(buckets.size());
  for (std::size_t i = 0; i < hypotheses.size(); ++i) {
    for (std::size_t b = 0; b < buckets.size(); ++b) {
      if (lengths[i] > buckets[b].lo && (!buckets[b].hi || lengths[i] <= *buckets[b].hi)) {
        stats[b] += bleu_stats(hypotheses[i], references[i]);
        ++buckets[b].count;
        break;
      }
    }
  }
  std::vector<LengthBucket> out;
  for (std::size_t b = 0; b < buckets.size(); ++b) {
    if (buckets[b].count == 0) continue;
    buckets[b].bleu = stats[b].score();
    out.push_back(buckets[b]);
  }
  return out;
}

LatencyStats measure_latency(const std::function<void(std::size_t)>& run, std::size_t n,
                             std::size_t warmup) {
  if (n == 0) throw Error("measure_latency: no runs");
  for (std::size_t i = 0; i < warmup; ++i) run(i % n);
  std::vector<double> times(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    run(i);
    times[i] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  LatencyStats s;
  s.runs = n;
  s.warmup = warmup;
  for (double t : times) s.mean_seconds += t;
  s.mean_seconds /= static_cast<double>(n);
  for (double t : times) s.stddev_seconds += (t - s.mean_seconds) * (t - s.mean_seconds);
  s.stddev_seconds = std::sqrt(s.stddev_seconds / static_cast<double>(n));
  return s;
}

std::string hardware_fingerprint() {
  std::string cpu = "unknown cpu";
  std::ifstream info("/proc/cpuinfo");
  for (std::string line; std::getline(info, line);) {
    if (line.rfind("model name", 0) == 0) {
      const auto colon = line.find(':');
      if (colon != std::string::npos) cpu = line.substr(colon + 2);
      break;
    }
  }
  std::string compiler;
#if defined(__clang__)
  compiler = "clang " __clang_version__;
#elif defined(__GNUC__)
  compiler = "gcc " __VERSION__;
#endif
  return cpu + "; " + std::to_string(std::thread::hardware_concurrency()) + " logical cores; " + compiler;
}

std::string format_bleu(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", value);
  return buf;
}

RENEWNAT_NAMESPACE_END
