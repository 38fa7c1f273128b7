// Copyright 2026 The renewnat Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef RENEWNAT_NUMERICS_RNG_HPP_
#define RENEWNAT_NUMERICS_RNG_HPP_

#include <cstdint>
#include <random>
#include <vector>

#include "renewnat/base.hpp"

RENEWNAT_NAMESPACE_BEGIN

// Seedable generator threaded explicitly through every stochastic op.
// Distributions are implemented here rather than with <random>'s
// distribution classes, whose output is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, 1) with 53 bits of precision.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n);

  bool bernoulli(double p) { return uniform() < p; }

  // Standard normal via Box-Muller.
  double normal();

  // k distinct indices from [0, n), in draw order.
  std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[below(i)]);
    }
  }

  // Derives an independent generator, e.g. one per dataset split.
  Rng fork() { return Rng(next() ^ 0x9e3779b97f4a7c15ULL); }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

RENEWNAT_NAMESPACE_END

#endif  // RENEWNAT_NUMERICS_RNG_HPP_
