// Copyright 2026 The renewnat Authors.
// SPDX-License-Identifier: Apache-2.0

#include "renewnat/numerics/grad_check.hpp"

#include <cmath>

#include "renewnat/numerics/rng.hpp"

RENEWNAT_NAMESPACE_BEGIN

namespace {

double evaluate(const LossFn& loss_fn, const std::string& context) {
  Tape tape(/*record=*/false);
  const double loss = static_cast<double>(tape.value(loss_fn(tape)).item());
  if (!std::isfinite(loss)) {
    throw NonFiniteError("finite_diff_check: non-finite loss " + std::to_string(loss) +
                         " (" + context + ")");
  }
  return loss;
}

}  // namespace

GradCheckReport finite_diff_check(const LossFn& loss_fn, ParameterStore& store,
                                  const GradCheckOptions& options) {
  store.zero_grad();
  {
    Tape tape;
    Var loss = loss_fn(tape);
    const double value = static_cast<double>(tape.value(loss).item());
    if (!std::isfinite(value)) {
      throw NonFiniteError("finite_diff_check: non-finite loss at the base point");
    }
    tape.backward(loss);
    tape.accumulate_gradients(store);
  }

  Rng rng(options.seed);
  GradCheckReport report;
  const auto h = static_cast<Scalar>(options.step);
  for (auto& p : store) {
    const std::size_t n = p.value.size();
    const std::size_t k = std::min(n, options.samples_per_param);
    for (std::size_t index : rng.sample_without_replacement(n, k)) {
      const Scalar original = p.value[index];
      p.value[index] = original + h;
      const double plus = evaluate(loss_fn, p.name + "+h");
      p.value[index] = original - h;
      const double minus = evaluate(loss_fn, p.name + "-h");
      p.value[index] = original;

      const double numeric = (plus - minus) / (2.0 * options.step);
      const double analytic = static_cast<double>(p.grad[index]);
      const double rel = std::abs(analytic - numeric) / (std::abs(numeric) + 1e-8);
      ++report.checked;
      if (rel > report.max_relative_error || report.checked == 1) {
        report.max_relative_error = rel;
        report.worst_param = p.name;
        report.worst_index = index;
        report.worst_analytic = analytic;
        report.worst_numeric = numeric;
      }
    }
  }
  store.zero_grad();
  return report;
}

RENEWNAT_NAMESPACE_END
