// Copyright 2026 The renewnat Authors.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <set>

#include "../support/oracles.hpp"
#include "renewnat/numerics/ops.hpp"
#include "renewnat/numerics/parameter_store.hpp"

using namespace renewnat;

namespace {

Array random_matrix(Rng& rng, std::size_t r, std::size_t c, double scale = 1.0) {
  Array a(Shape{r, c});
  for (auto& x : a.data()) x = static_cast<Scalar>(rng.normal() * scale);
  return a;
}

oracle::Matrix to_oracle(const Array& a) {
  oracle::Matrix m = oracle::zeros(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m[i][j] = a.at(i, j);
  return m;
}

}  // namespace

TEST_SUITE("array") {
  TEST_CASE("shape and size agree") {
    Array a(Shape{2, 3, 4});
    CHECK(a.size() == 24);
    CHECK(a.rows() == 6);
    CHECK(a.cols() == 4);
    CHECK_THROWS_AS(Array(Shape{2, 2}, std::vector<Scalar>(3)), ShapeError);
  }

  TEST_CASE("softmax of zeros is uniform") {
    const Array s = softmax(Array::matrix(1, 2, {0, 0}), 1);
    CHECK(s[0] == doctest::Approx(0.5));
    CHECK(s[1] == doctest::Approx(0.5));
  }

  TEST_CASE("softmax is stable for large inputs") {
    const Array s = softmax(Array::matrix(1, 3, {1000, 1000, 1000}), 1);
    for (Scalar v : s.data()) {
      CHECK(std::isfinite(v));
      CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-6));
    }
  }

  TEST_CASE("softmax of [1,2,3] matches the scalar oracle") {
    const Array s = softmax(Array::matrix(1, 3, {1, 2, 3}), 1);
    const auto ref = oracle::softmax({1, 2, 3});
    for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(s[i] - ref[i]) < 1e-6);
  }

  TEST_CASE("softmax along the first axis") {
    const Array x = Array::matrix(2, 2, {0, 5, 0, 5});
    const Array s = softmax(x, 0);
    CHECK(s.at(0, 0) == doctest::Approx(0.5));
    CHECK(s.at(1, 1) == doctest::Approx(0.5));
    CHECK_THROWS_AS(softmax(x, 2), ShapeError);
  }

  TEST_CASE("softmax rows sum to one on random inputs") {
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
      const Array x = random_matrix(rng, 4, 7, 20.0);
      const Array s = softmax(x, 1);
      for (std::size_t r = 0; r < 4; ++r) {
        double total = 0;
        for (Scalar v : s.row(r)) {
          CHECK(v >= 0);
          total += v;
        }
        CHECK(std::abs(total - 1.0) < 1e-6);
      }
    }
  }

  TEST_CASE("argmax prefers the lower index on ties") {
    const auto best = argmax_rows(Array::matrix(2, 3, {1, 3, 3, 2, 2, 0}));
    CHECK(best == std::vector<std::size_t>{1, 0});
  }
}

TEST_SUITE("rng") {
  TEST_CASE("same seed gives the same stream") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
  }

  TEST_CASE("below stays in range and sample_without_replacement is distinct") {
    Rng rng(5);
    for (int i = 0; i < 1000; ++i) CHECK(rng.below(7) < 7);
    const auto s = rng.sample_without_replacement(10, 10);
    CHECK(std::set<std::size_t>(s.begin(), s.end()).size() == 10);
  }

  TEST_CASE("normal has roughly unit variance") {
    Rng rng(9);
    double sum = 0, sq = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
      const double x = rng.normal();
      sum += x;
      sq += x * x;
    }
    CHECK(std::abs(sum / n) < 0.03);
    CHECK(std::abs(sq / n - 1.0) < 0.05);
  }
}

TEST_SUITE("ops") {
  TEST_CASE("matmul and transposed matmul match the oracle") {
    Rng rng(1);
    Tape tape;
    const Array a = random_matrix(rng, 3, 4);
    const Array b = random_matrix(rng, 4, 5);
    const Array bt = random_matrix(rng, 5, 4);
    const Array out = tape.value(matmul(tape, tape.constant(a), tape.constant(b)));
    const auto ref = oracle::matmul(to_oracle(a), to_oracle(b));
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 5; ++j) CHECK(std::abs(out.at(i, j) - ref[i][j]) < 1e-5);

    const Array out_t = tape.value(matmul(tape, tape.constant(a), tape.constant(bt), true));
    oracle::Matrix btt = oracle::zeros(4, 5);
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t j = 0; j < 4; ++j) btt[j][i] = bt.at(i, j);
    const auto ref_t = oracle::matmul(to_oracle(a), btt);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 5; ++j) CHECK(std::abs(out_t.at(i, j) - ref_t[i][j]) < 1e-5);
  }

  TEST_CASE("layer norm of a constant row is zero") {
    Tape tape;
    Var x = tape.constant(Array::matrix(1, 3, {4, 4, 4}));
    Var g = tape.constant(Array::filled(Shape{3}, 1));
    Var b = tape.constant(Array::zeros(Shape{3}));
    for (Scalar v : tape.value(layer_norm(tape, x, g, b)).data()) CHECK(std::abs(v) < 1e-6);
  }

  TEST_CASE("layer norm of [1,-1] is about [1,-1]") {
    Tape tape;
    Var x = tape.constant(Array::matrix(1, 2, {1, -1}));
    const Array out = tape.value(layer_norm(tape, x, tape.constant(Array::filled(Shape{2}, 1)),
                                            tape.constant(Array::zeros(Shape{2}))));
    CHECK(out[0] == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(out[1] == doctest::Approx(-1.0).epsilon(1e-4));
  }

  TEST_CASE("layer norm matches the oracle and normalises rows") {
    Rng rng(2);
    Tape tape;
    const Array x = random_matrix(rng, 2, 4, 3.0);
    const Array g = random_matrix(rng, 1, 4).reshaped(Shape{4});
    const Array b = random_matrix(rng, 1, 4).reshaped(Shape{4});
    const Array out = tape.value(layer_norm(tape, tape.constant(x), tape.constant(g), tape.constant(b)));
    std::vector<double> gv(g.data().begin(), g.data().end()), bv(b.data().begin(), b.data().end());
    const auto ref = oracle::layer_norm(to_oracle(x), gv, bv);
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 4; ++j) CHECK(std::abs(out.at(i, j) - ref[i][j]) < 1e-5);

    const Array plain = tape.value(layer_norm(tape, tape.constant(x), tape.constant(Array::filled(Shape{4}, 1)),
                                              tape.constant(Array::zeros(Shape{4}))));
    for (std::size_t r = 0; r < 2; ++r) {
      double mean = 0, var = 0;
      for (Scalar v : plain.row(r)) mean += v;
      mean /= 4;
      for (Scalar v : plain.row(r)) var += (v - mean) * (v - mean);
      CHECK(std::abs(mean) < 1e-5);
      CHECK(std::abs(var / 4 - 1.0) < 1e-4);
    }
  }

  TEST_CASE("cross entropy of uniform logits is ln V") {
    Tape tape;
    Var logits = tape.constant(Array::zeros(Shape{1, 7}));
    const std::vector<TokenId> targets{3};
    const std::vector<std::uint8_t> include{1};
    const Scalar loss = tape.value(cross_entropy(tape, logits, targets, include)).item();
    CHECK(loss == doctest::Approx(std::log(7.0)).epsilon(1e-6));
  }

  TEST_CASE("cross entropy approaches zero for confident correct logits") {
    Tape tape;
    Var logits = tape.constant(Array::matrix(1, 3, {0, 80, 0}));
    const std::vector<TokenId> targets{1};
    const std::vector<std::uint8_t> include{1};
    CHECK(tape.value(cross_entropy(tape, logits, targets, include)).item() < 1e-6);
  }

  TEST_CASE("masked cross entropy matches the oracle with and without smoothing") {
    Rng rng(11);
    const Array x = random_matrix(rng, 3, 5);
    const std::vector<TokenId> targets{4, 0, 2};
    const std::vector<std::uint8_t> include{1, 0, 1};
    for (double smoothing : {0.0, 0.1}) {
      Tape tape;
      const Scalar loss =
          tape.value(cross_entropy(tape, tape.constant(x), targets, include, static_cast<Scalar>(smoothing))).item();
      const double ref = oracle::cross_entropy(to_oracle(x), {4, 0, 2}, {true, false, true}, smoothing);
      CHECK(std::abs(loss - ref) < 1e-6);
    }
  }

  TEST_CASE("cross entropy gives excluded rows exactly zero gradient") {
    Rng rng(12);
    ParameterStore store;
    store.add("logits", random_matrix(rng, 4, 6));
    Tape tape;
    Var logits = tape.parameter(store.at("logits"));
    const std::vector<TokenId> targets{1, 2, 3, 4};
    const std::vector<std::uint8_t> include{0, 1, 0, 1};
    tape.backward(cross_entropy(tape, logits, targets, include, Scalar(0.1)));
    const Array& g = tape.grad(logits);
    for (std::size_t r : {0u, 2u})
      for (Scalar v : g.row(r)) CHECK(v == 0.0f);
  }

  TEST_CASE("cross entropy with nothing included is degenerate") {
    Tape tape;
    const std::vector<TokenId> targets{0, 0};
    const std::vector<std::uint8_t> include{0, 0};
    CHECK_THROWS_AS(cross_entropy(tape, tape.constant(Array::zeros(Shape{2, 3})), targets, include),
                    DegenerateBatchError);
  }

  TEST_CASE("embedding rejects out-of-vocabulary ids") {
    Tape tape;
    Var table = tape.constant(Array::zeros(Shape{5, 2}));
    const std::vector<TokenId> bad{5};
    CHECK_THROWS_AS(embedding(tape, table, bad, 1), ShapeError);
  }

  TEST_CASE("dropout with p = 0 is the identity and otherwise preserves the mean") {
    Rng rng(4);
    Tape tape;
    Var x = tape.constant(Array::filled(Shape{200, 50}, 1));
    CHECK(dropout(tape, x, 0, rng).id == x.id);
    const Array out = tape.value(dropout(tape, x, Scalar(0.1), rng));
    double mean = 0;
    for (Scalar v : out.data()) mean += v;
    CHECK(mean / static_cast<double>(out.size()) == doctest::Approx(1.0).epsilon(0.02));
  }
}

TEST_SUITE("attention") {
  TEST_CASE("a single key returns its value whatever the query") {
    Rng rng(6);
    Tape tape;
    const Array v = random_matrix(rng, 1, 4);
    AttentionLayout layout{1, 2, 1, 2, {1}, false};
    const Array out = tape.value(attention(tape, tape.constant(random_matrix(rng, 2, 4)),
                                           tape.constant(random_matrix(rng, 1, 4)), tape.constant(v), layout));
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 4; ++j) CHECK(out.at(i, j) == doctest::Approx(v.at(0, j)));
  }

  TEST_CASE("two identical keys split attention evenly") {
    Tape tape;
    const Array k = Array::matrix(2, 2, {1, 2, 1, 2});
    const Array v = Array::matrix(2, 2, {0, 4, 2, 0});
    AttentionLayout layout{1, 1, 2, 1, {2}, false};
    const Array out = tape.value(attention(tape, tape.constant(Array::matrix(1, 2, {3, -1})),
                                           tape.constant(k), tape.constant(v), layout));
    CHECK(out[0] == doctest::Approx(1.0));
    CHECK(out[1] == doctest::Approx(2.0));
  }

  TEST_CASE("two-head attention with padding and causality matches the oracle") {
    Rng rng(7);
    for (bool causal : {false, true}) {
      Tape tape;
      const std::size_t b = 2, t = 4, d = 6;
      const Array q = random_matrix(rng, b * t, d);
      const Array k = random_matrix(rng, b * t, d);
      const Array v = random_matrix(rng, b * t, d);
      AttentionLayout layout{b, t, t, 2, {4, 3}, causal};
      const Array out = tape.value(attention(tape, tape.constant(q), tape.constant(k), tape.constant(v), layout));
      for (std::size_t s = 0; s < b; ++s) {
        auto slice = [&](const Array& a) {
          oracle::Matrix m = oracle::zeros(t, d);
          for (std::size_t i = 0; i < t; ++i)
            for (std::size_t j = 0; j < d; ++j) m[i][j] = a.at(s * t + i, j);
          return m;
        };
        const auto ref = oracle::attention(slice(q), slice(k), slice(v), 2, layout.key_lengths[s], causal);
        for (std::size_t i = 0; i < t; ++i)
          for (std::size_t j = 0; j < d; ++j) CHECK(std::abs(out.at(s * t + i, j) - ref[i][j]) < 1e-5);
      }
    }
  }

  TEST_CASE("zero visible keys are rejected") {
    Tape tape;
    AttentionLayout layout{1, 1, 2, 1, {0}, false};
    Var z = tape.constant(Array::zeros(Shape{2, 2}));
    CHECK_THROWS_AS(attention(tape, tape.constant(Array::zeros(Shape{1, 2})), z, z, layout), ShapeError);
  }
}

TEST_SUITE("adam") {
  TEST_CASE("zero gradients leave parameters unchanged") {
    ParameterStore store;
    store.add("w", Array::matrix(1, 2, {0.5f, -1.5f}));
    store.at("w").has_grad = true;
    adam_step(store, AdamConfig{});
    CHECK(store.at("w").value == Array::matrix(1, 2, {0.5f, -1.5f}));
    CHECK(store.step() == 1);
  }

  TEST_CASE("first bias-corrected step moves by about lr") {
    ParameterStore store;
    store.add("w", Array::scalar(2.0f));
    store.at("w").grad = Array::scalar(0.37f);
    store.at("w").has_grad = true;
    AdamConfig config;
    config.lr = 0.01;
    adam_step(store, config);
    CHECK(store.at("w").value.item() == doctest::Approx(2.0 - 0.01).epsilon(1e-5));
    CHECK(store.at("w").grad.item() == 0.0f);
  }

  TEST_CASE("Adam follows the textbook update for several steps") {
    ParameterStore store;
    store.add("w", Array::scalar(1.0f));
    AdamConfig config{0.05, 0.9, 0.98, 1e-8};
    double w = 1.0, m = 0, v = 0;
    for (int t = 1; t <= 5; ++t) {
      const double g = 2 * w - 0.3;
      store.at("w").grad = Array::scalar(static_cast<Scalar>(2 * store.at("w").value.item() - 0.3));
      store.at("w").has_grad = true;
      adam_step(store, config);
      m = 0.9 * m + 0.1 * g;
      v = 0.98 * v + 0.02 * g * g;
      const double mh = m / (1 - std::pow(0.9, t));
      const double vh = v / (1 - std::pow(0.98, t));
      w -= 0.05 * mh / (std::sqrt(vh) + 1e-8);
      CHECK(store.at("w").value.item() == doctest::Approx(w).epsilon(1e-5));
    }
  }

  TEST_CASE("three steps on a quadratic bowl decrease the loss") {
    ParameterStore store;
    store.add("w", Array::matrix(1, 3, {1.0f, -2.0f, 0.5f}));
    auto loss = [&] {
      double s = 0;
      for (Scalar x : store.at("w").value.data()) s += x * x;
      return s;
    };
    double previous = loss();
    for (int step = 0; step < 3; ++step) {
      Param& p = store.at("w");
      p.grad = p.value;
      for (auto& g : p.grad.data()) g *= 2;
      p.has_grad = true;
      adam_step(store, AdamConfig{0.1});
      const double now = loss();
      CHECK(now < previous);
      previous = now;
    }
  }

  TEST_CASE("a parameter without a gradient is an invariant violation") {
    ParameterStore store;
    store.add("a", Array::scalar(1));
    store.add("b", Array::scalar(1));
    store.at("a").has_grad = true;
    CHECK_THROWS_AS(adam_step(store, AdamConfig{}), InvariantError);
  }

  TEST_CASE("parameter names are unique and iteration follows insertion order") {
    ParameterStore store;
    store.add("z", Array::scalar(0));
    store.add("a", Array::scalar(0));
    CHECK_THROWS(store.add("z", Array::scalar(1)));
    std::vector<std::string> names;
    for (const auto& p : store) names.push_back(p.name);
    CHECK(names == std::vector<std::string>{"z", "a"});
    CHECK(store.at("a").m.same_shape(store.at("a").value));
  }

  TEST_CASE("inverse square root schedule peaks at the end of warmup") {
    CHECK(inverse_sqrt_lr(5e-4, 4000, 2000) == doctest::Approx(2.5e-4));
    CHECK(inverse_sqrt_lr(5e-4, 4000, 4000) == doctest::Approx(5e-4));
    CHECK(inverse_sqrt_lr(5e-4, 4000, 16000) == doctest::Approx(2.5e-4));
  }
}
