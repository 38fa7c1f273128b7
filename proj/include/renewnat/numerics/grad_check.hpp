// Copyright 2026 The renewnat Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef RENEWNAT_NUMERICS_GRAD_CHECK_HPP_
#define RENEWNAT_NUMERICS_GRAD_CHECK_HPP_

#include <cstdint>
#include <functional>
#include <string>

#include "renewnat/numerics/parameter_store.hpp"
#include "renewnat/numerics/tape.hpp"

RENEWNAT_NAMESPACE_BEGIN

// Builds the scalar loss on the given tape from the parameters of the store
// being checked. Must be deterministic: any randomness has to be re-seeded
// inside the closure.
using LossFn = std::function<Var(Tape&)>;

struct GradCheckOptions {
  double step = 1e-3;
  // Entries checked per parameter array (all entries if the array is smaller).
  std::size_t samples_per_param = 6;
  std::uint64_t seed = 17;
};

struct GradCheckReport {
  double max_relative_error = 0;
  std::string worst_param;
  std::size_t worst_index = 0;
  double worst_analytic = 0;
  double worst_numeric = 0;
  std::size_t checked = 0;
};

// Compares reverse-mode gradients with central differences
//   |analytic - numeric| / (|numeric| + 1e-8)
// over sampled entries of every parameter. Throws NonFiniteError if any loss
// evaluation is not finite. Parameter values are restored before returning.
GradCheckReport finite_diff_check(const LossFn& loss_fn, ParameterStore& store,
                                  const GradCheckOptions& options = {});

RENEWNAT_NAMESPACE_END

#endif  // RENEWNAT_NUMERICS_GRAD_CHECK_HPP_
