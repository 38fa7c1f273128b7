// Copyright 2026 The renewnat Authors.
// SPDX-License-Identifier: Apache-2.0

#include "renewnat/numerics/ops.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>

RENEWNAT_NAMESPACE_BEGIN

namespace {

using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixMap = Eigen::Map<Matrix>;
using ConstMatrixMap = Eigen::Map<const Matrix>;
using Strided = Eigen::Map<Matrix, 0, Eigen::OuterStride<>>;
using ConstStrided = Eigen::Map<const Matrix, 0, Eigen::OuterStride<>>;
using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

MatrixMap as_matrix(Array& a) {
  return MatrixMap(a.ptr(), static_cast<Eigen::Index>(a.rows()),
                   static_cast<Eigen::Index>(a.cols()));
}

ConstMatrixMap as_matrix(const Array& a) {
  return ConstMatrixMap(a.ptr(), static_cast<Eigen::Index>(a.rows()),
                        static_cast<Eigen::Index>(a.cols()));
}

Shape matrix_shape(std::size_t rows, std::size_t cols) { return {rows, cols}; }

void accumulate(Array& dst, const Array& src) {
  auto d = dst.data();
  auto s = src.data();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] += s[i];
}

}  // namespace

Var matmul(Tape& tape, Var a, Var b, bool transpose_b) {
  const Array& av = tape.value(a);
  const Array& bv = tape.value(b);
  const std::size_t inner = transpose_b ? bv.cols() : bv.rows();
  if (av.cols() != inner) {
    throw ShapeError("matmul: " + shape_string(av.shape()) + " x " +
                     shape_string(bv.shape()) + (transpose_b ? "^T" : ""));
  }
  const std::size_t out_cols = transpose_b ? bv.rows() : bv.cols();
  Array out(matrix_shape(av.rows(), out_cols));
  if (transpose_b) {
    as_matrix(out).noalias() = as_matrix(av) * as_matrix(bv).transpose();
  } else {
    as_matrix(out).noalias() = as_matrix(av) * as_matrix(bv);
  }
  return tape.push(std::move(out), {a, b}, [a, b, transpose_b](Tape& t, const Array& g) {
    const auto gm = as_matrix(g);
    if (t.requires_grad(a)) {
      const auto bm = as_matrix(t.value(b));
      if (transpose_b) {
        as_matrix(t.grad(a)).noalias() += gm * bm;
      } else {
        as_matrix(t.grad(a)).noalias() += gm * bm.transpose();
      }
    }
    if (t.requires_grad(b)) {
      const auto am = as_matrix(t.value(a));
      if (transpose_b) {
        as_matrix(t.grad(b)).noalias() += gm.transpose() * am;
      } else {
        as_matrix(t.grad(b)).noalias() += am.transpose() * gm;
      }
    }
  });
}

Var linear(Tape& tape, Var x, Var weight, Var bias) {
  const Array& xv = tape.value(x);
  const Array& wv = tape.value(weight);
  if (xv.cols() != wv.rows() || wv.rank() != 2) {
    throw ShapeError("linear: input " + shape_string(xv.shape()) + " weight " +
                     shape_string(wv.shape()));
  }
  Shape shape = xv.shape();
  if (shape.empty()) shape = {1};
  shape.back() = wv.cols();
  Array out(shape);
  auto om = as_matrix(out);
  om.noalias() = as_matrix(xv) * as_matrix(wv);
  if (bias.valid()) {
    const Array& bv = tape.value(bias);
    if (bv.size() != wv.cols()) throw ShapeError("linear: bias size mismatch");
    om.rowwise() += ConstMatrixMap(bv.ptr(), 1, static_cast<Eigen::Index>(bv.size())).row(0);
  }
  return tape.push(std::move(out), {x, weight, bias},
                   [x, weight, bias](Tape& t, const Array& g) {
                     const auto gm = as_matrix(g);
                     if (t.requires_grad(x)) {
                       as_matrix(t.grad(x)).noalias() += gm * as_matrix(t.value(weight)).transpose();
                     }
                     if (t.requires_grad(weight)) {
                       as_matrix(t.grad(weight)).noalias() += as_matrix(t.value(x)).transpose() * gm;
                     }
                     if (bias.valid() && t.requires_grad(bias)) {
                       Array& gb = t.grad(bias);
                       MatrixMap(gb.ptr(), 1, static_cast<Eigen::Index>(gb.size())) +=
                           gm.colwise().sum();
                     }
                   });
}

Var add(Tape& tape, Var a, Var b) {
  const Array& av = tape.value(a);
  const Array& bv = tape.value(b);
  if (av.size() != bv.size()) require_same_shape(av, bv, "add");
  Array out = av;
  auto o = out.data();
  auto bd = bv.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] += bd[i];
  return tape.push(std::move(out), {a, b}, [a, b](Tape& t, const Array& g) {
    if (t.requires_grad(a)) accumulate(t.grad(a), g);
    if (t.requires_grad(b)) accumulate(t.grad(b), g);
  });
}

Var scale(Tape& tape, Var a, Scalar factor) {
  Array out = tape.value(a);
  for (auto& x : out.data()) x *= factor;
  return tape.push(std::move(out), {a}, [a, factor](Tape& t, const Array& g) {
    auto ga = t.grad(a).data();
    auto gd = g.data();
    for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += factor * gd[i];
  });
}

Var relu(Tape& tape, Var x) {
  Array out = tape.value(x);
  for (auto& v : out.data()) v = std::max(v, Scalar(0));
  return tape.push(std::move(out), {x}, [x](Tape& t, const Array& g) {
    const auto xv = t.value(x).data();
    auto gx = t.grad(x).data();
    auto gd = g.data();
    for (std::size_t i = 0; i < gx.size(); ++i) {
      if (xv[i] > 0) gx[i] += gd[i];
    }
  });
}

Var layer_norm(Tape& tape, Var x, Var gain, Var bias, Scalar eps) {
  const Array& xv = tape.value(x);
  const Array& gv = tape.value(gain);
  const Array& bv = tape.value(bias);
  const std::size_t rows = xv.rows();
  const std::size_t cols = xv.cols();
  if (gv.size() != cols || bv.size() != cols) throw ShapeError("layer_norm: gain/bias size");

  Array out(xv.shape());
  Array normalized(xv.shape());
  std::vector<Scalar> inv_std(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    auto in = xv.row(r);
    Scalar mean = 0;
    for (Scalar v : in) mean += v;
    mean /= static_cast<Scalar>(cols);
    Scalar var = 0;
    for (Scalar v : in) var += (v - mean) * (v - mean);
    var /= static_cast<Scalar>(cols);
    const Scalar rstd = Scalar(1) / std::sqrt(var + eps);
    inv_std[r] = rstd;
    auto xhat = normalized.row(r);
    auto o = out.row(r);
    for (std::size_t c = 0; c < cols; ++c) {
      xhat[c] = (in[c] - mean) * rstd;
      o[c] = xhat[c] * gv[c] + bv[c];
    }
  }
  return tape.push(
      std::move(out), {x, gain, bias},
      [x, gain, bias, normalized = std::move(normalized), inv_std = std::move(inv_std)](
          Tape& t, const Array& g) {
        const std::size_t rows = normalized.rows();
        const std::size_t cols = normalized.cols();
        const Array& gv = t.value(gain);
        if (t.requires_grad(gain) || t.requires_grad(bias)) {
          std::vector<Scalar> dgain(cols, 0), dbias(cols, 0);
          for (std::size_t r = 0; r < rows; ++r) {
            auto gr = g.row(r);
            auto xhat = normalized.row(r);
            for (std::size_t c = 0; c < cols; ++c) {
              dgain[c] += gr[c] * xhat[c];
              dbias[c] += gr[c];
            }
          }
          if (t.requires_grad(gain)) {
            auto d = t.grad(gain).data();
            for (std::size_t c = 0; c < cols; ++c) d[c] += dgain[c];
          }
          if (t.requires_grad(bias)) {
            auto d = t.grad(bias).data();
            for (std::size_t c = 0; c < cols; ++c) d[c] += dbias[c];
          }
        }
        if (!t.requires_grad(x)) return;
        Array& gx = t.grad(x);
        std::vector<Scalar> dxhat(cols);
        for (std::size_t r = 0; r < rows; ++r) {
          auto gr = g.row(r);
          auto xhat = normalized.row(r);
          Scalar mean_d = 0, mean_dx = 0;
          for (std::size_t c = 0; c < cols; ++c) {
            dxhat[c] = gr[c] * gv[c];
            mean_d += dxhat[c];
            mean_dx += dxhat[c] * xhat[c];
          }
          mean_d /= static_cast<Scalar>(cols);
          mean_dx /= static_cast<Scalar>(cols);
          auto dst = gx.row(r);
          for (std::size_t c = 0; c < cols; ++c) {
            dst[c] += inv_std[r] * (dxhat[c] - mean_d - xhat[c] * mean_dx);
          }
        }
      });
}

Var embedding(Tape& tape, Var table, std::span<const TokenId> ids, Scalar factor) {
  const Array& tv = tape.value(table);
  const std::size_t vocab = tv.rows();
  const std::size_t dim = tv.cols();
  Array out(matrix_shape(ids.size(), dim));
  for (std::size_t r = 0; r < ids.size(); ++r) {
    if (ids[r] < 0 || static_cast<std::size_t>(ids[r]) >= vocab) {
      throw ShapeError("embedding: token id " + std::to_string(ids[r]) +
                       " outside vocabulary of size " + std::to_string(vocab));
    }
    auto src = tv.row(static_cast<std::size_t>(ids[r]));
    auto dst = out.row(r);
    for (std::size_t c = 0; c < dim; ++c) dst[c] = src[c] * factor;
  }
  std::vector<TokenId> kept(ids.begin(), ids.end());
  return tape.push(std::move(out), {table},
                   [table, factor, kept = std::move(kept)](Tape& t, const Array& g) {
                     Array& gt = t.grad(table);
                     for (std::size_t r = 0; r < kept.size(); ++r) {
                       auto dst = gt.row(static_cast<std::size_t>(kept[r]));
                       auto src = g.row(r);
                       for (std::size_t c = 0; c < dst.size(); ++c) dst[c] += factor * src[c];
                     }
                   });
}

Var dropout(Tape& tape, Var x, Scalar p, Rng& rng) {
  if (p <= 0) return x;
  if (p >= 1) throw ConfigError("dropout probability must be < 1");
  const Array& xv = tape.value(x);
  Array mask(xv.shape());
  const Scalar keep_scale = Scalar(1) / (Scalar(1) - p);
  for (auto& m : mask.data()) m = rng.bernoulli(p) ? Scalar(0) : keep_scale;
  Array out = xv;
  auto o = out.data();
  auto md = mask.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] *= md[i];
  return tape.push(std::move(out), {x}, [x, mask = std::move(mask)](Tape& t, const Array& g) {
    auto gx = t.grad(x).data();
    auto gd = g.data();
    auto md = mask.data();
    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += gd[i] * md[i];
  });
}

Var mix_rows(Tape& tape, Var x, const RowMix& mix) {
  const Array& xv = tape.value(x);
  const std::size_t cols = xv.cols();
  Array out(matrix_shape(mix.size(), cols));
  for (std::size_t r = 0; r < mix.size(); ++r) {
    auto dst = out.row(r);
    for (const auto& [src_row, w] : mix[r]) {
      if (src_row >= xv.rows()) throw ShapeError("mix_rows: source row out of range");
      auto src = xv.row(src_row);
      for (std::size_t c = 0; c < cols; ++c) dst[c] += w * src[c];
    }
  }
  return tape.push(std::move(out), {x}, [x, mix](Tape& t, const Array& g) {
    Array& gx = t.grad(x);
    for (std::size_t r = 0; r < mix.size(); ++r) {
      auto src = g.row(r);
      for (const auto& [src_row, w] : mix[r]) {
        auto dst = gx.row(src_row);
        for (std::size_t c = 0; c < dst.size(); ++c) dst[c] += w * src[c];
      }
    }
  });
}

Var select_rows(Tape& tape, Var a, Var b, std::span<const std::uint8_t> take_b) {
  const Array& av = tape.value(a);
  const Array& bv = tape.value(b);
  require_same_shape(av, bv, "select_rows");
  if (take_b.size() != av.rows()) throw ShapeError("select_rows: selector length");
  Array out = av;
  for (std::size_t r = 0; r < take_b.size(); ++r) {
    if (take_b[r]) std::copy(bv.row(r).begin(), bv.row(r).end(), out.row(r).begin());
  }
  std::vector<std::uint8_t> sel(take_b.begin(), take_b.end());
  return tape.push(std::move(out), {a, b}, [a, b, sel = std::move(sel)](Tape& t, const Array& g) {
    for (std::size_t r = 0; r < sel.size(); ++r) {
      Var target = sel[r] ? b : a;
      if (!t.requires_grad(target)) continue;
      auto dst = t.grad(target).row(r);
      auto src = g.row(r);
      for (std::size_t c = 0; c < dst.size(); ++c) dst[c] += src[c];
    }
  });
}

Var attention(Tape& tape, Var q, Var k, Var v, const AttentionLayout& layout) {
  const Array& qv = tape.value(q);
  const Array& kv = tape.value(k);
  const Array& vv = tape.value(v);
  const std::size_t batch = layout.batch;
  const std::size_t tq = layout.query_len;
  const std::size_t tk = layout.key_len;
  const std::size_t d = qv.cols();
  const std::size_t heads = layout.heads;
  if (heads == 0 || d % heads != 0) throw ShapeError("attention: model dim not divisible by heads");
  if (qv.rows() != batch * tq || kv.rows() != batch * tk || vv.rows() != batch * tk ||
      kv.cols() != d || vv.cols() != d || layout.key_lengths.size() != batch) {
    throw ShapeError("attention: inconsistent layout");
  }
  const std::size_t dh = d / heads;
  const Scalar scale_factor = Scalar(1) / std::sqrt(static_cast<Scalar>(dh));
  const auto ld = static_cast<Eigen::Index>(d);
  const auto etq = static_cast<Eigen::Index>(tq);
  const auto etk = static_cast<Eigen::Index>(tk);
  const auto edh = static_cast<Eigen::Index>(dh);

  Array out(matrix_shape(batch * tq, d));
  Array probs(Shape{batch, heads, tq, tk});
  Matrix scores(etq, etk);
  for (std::size_t b = 0; b < batch; ++b) {
    const std::size_t visible = layout.key_lengths[b];
    if (visible == 0 || visible > tk) throw ShapeError("attention: invalid key length");
    for (std::size_t h = 0; h < heads; ++h) {
      ConstStrided qb(qv.ptr() + b * tq * d + h * dh, etq, edh, Eigen::OuterStride<>(ld));
      ConstStrided kb(kv.ptr() + b * tk * d + h * dh, etk, edh, Eigen::OuterStride<>(ld));
      ConstStrided vb(vv.ptr() + b * tk * d + h * dh, etk, edh, Eigen::OuterStride<>(ld));
      scores.noalias() = qb * kb.transpose();
      MatrixMap p(probs.ptr() + (b * heads + h) * tq * tk, etq, etk);
      for (std::size_t i = 0; i < tq; ++i) {
        const std::size_t limit = layout.causal ? std::min(visible, i + 1) : visible;
        Scalar peak = -std::numeric_limits<Scalar>::infinity();
        for (std::size_t j = 0; j < limit; ++j) {
          peak = std::max(peak, scores(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) *
                                    scale_factor);
        }
        Scalar total = 0;
        for (std::size_t j = 0; j < tk; ++j) {
          const auto ei = static_cast<Eigen::Index>(i);
          const auto ej = static_cast<Eigen::Index>(j);
          if (j < limit) {
            p(ei, ej) = std::exp(scores(ei, ej) * scale_factor - peak);
            total += p(ei, ej);
          } else {
            p(ei, ej) = 0;
          }
        }
        p.row(static_cast<Eigen::Index>(i)) /= total;
      }
      Strided ob(out.ptr() + b * tq * d + h * dh, etq, edh, Eigen::OuterStride<>(ld));
      ob.noalias() = p * vb;
    }
  }

  return tape.push(
      std::move(out), {q, k, v},
      [q, k, v, batch, tq, tk, d, heads, dh, scale_factor, probs = std::move(probs)](
          Tape& t, const Array& g) {
        const auto ld = static_cast<Eigen::Index>(d);
        const auto etq = static_cast<Eigen::Index>(tq);
        const auto etk = static_cast<Eigen::Index>(tk);
        const auto edh = static_cast<Eigen::Index>(dh);
        const Array& qv = t.value(q);
        const Array& kv = t.value(k);
        const Array& vv = t.value(v);
        Array* gq = t.requires_grad(q) ? &t.grad(q) : nullptr;
        Array* gk = t.requires_grad(k) ? &t.grad(k) : nullptr;
        Array* gv = t.requires_grad(v) ? &t.grad(v) : nullptr;
        Matrix dp(etq, etk);
        for (std::size_t b = 0; b < batch; ++b) {
          for (std::size_t h = 0; h < heads; ++h) {
            const std::size_t off_q = b * tq * d + h * dh;
            const std::size_t off_k = b * tk * d + h * dh;
            ConstMatrixMap p(probs.ptr() + (b * heads + h) * tq * tk, etq, etk);
            ConstStrided go(g.ptr() + off_q, etq, edh, Eigen::OuterStride<>(ld));
            ConstStrided qb(qv.ptr() + off_q, etq, edh, Eigen::OuterStride<>(ld));
            ConstStrided kb(kv.ptr() + off_k, etk, edh, Eigen::OuterStride<>(ld));
            ConstStrided vb(vv.ptr() + off_k, etk, edh, Eigen::OuterStride<>(ld));
            if (gv) {
              Strided dv(gv->ptr() + off_k, etk, edh, Eigen::OuterStride<>(ld));
              dv.noalias() += p.transpose() * go;
            }
            if (!gq && !gk) continue;
            dp.noalias() = go * vb.transpose();
            // dS = P * (dP - rowsum(dP * P)), folded with the score scale.
            for (Eigen::Index i = 0; i < etq; ++i) {
              const Scalar dot = p.row(i).dot(dp.row(i));
              dp.row(i) = (p.row(i).array() * (dp.row(i).array() - dot) * scale_factor).matrix();
            }
            if (gq) {
              Strided dq(gq->ptr() + off_q, etq, edh, Eigen::OuterStride<>(ld));
              dq.noalias() += dp * kb;
            }
            if (gk) {
              Strided dk(gk->ptr() + off_k, etk, edh, Eigen::OuterStride<>(ld));
              dk.noalias() += dp.transpose() * qb;
            }
          }
        }
      });
}

Var cross_entropy(Tape& tape, Var logits, std::span<const TokenId> targets,
                  std::span<const std::uint8_t> include, Scalar label_smoothing) {
  const Array& lv = tape.value(logits);
  const std::size_t rows = lv.rows();
  const std::size_t classes = lv.cols();
  if (targets.size() != rows || include.size() != rows) {
    throw ShapeError("cross_entropy: targets/include length must equal logits rows");
  }
  std::size_t count = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    if (!include[r]) continue;
    if (targets[r] < 0 || static_cast<std::size_t>(targets[r]) >= classes) {
      throw ShapeError("cross_entropy: target out of range");
    }
    ++count;
  }
  if (count == 0) throw DegenerateBatchError("cross_entropy: no contributing positions");

  const Array log_probs = log_softmax_rows(lv);
  const Scalar uniform_weight = label_smoothing / static_cast<Scalar>(classes);
  double total = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    if (!include[r]) continue;
    auto lp = log_probs.row(r);
    const auto y = static_cast<std::size_t>(targets[r]);
    double row_loss = -(1.0 - label_smoothing) * lp[y];
    if (label_smoothing > 0) {
      double s = 0;
      for (Scalar x : lp) s += x;
      row_loss -= uniform_weight * s;
    }
    total += row_loss;
  }
  const Scalar inv_count = Scalar(1) / static_cast<Scalar>(count);
  Array out = Array::scalar(static_cast<Scalar>(total / static_cast<double>(count)));

  std::vector<TokenId> kept_targets(targets.begin(), targets.end());
  std::vector<std::uint8_t> kept_include(include.begin(), include.end());
  return tape.push(std::move(out), {logits},
                   [logits, log_probs, kept_targets = std::move(kept_targets),
                    kept_include = std::move(kept_include), label_smoothing, uniform_weight,
                    inv_count](Tape& t, const Array& g) {
                     const Scalar upstream = g.item() * inv_count;
                     Array& gl = t.grad(logits);
                     for (std::size_t r = 0; r < kept_include.size(); ++r) {
                       if (!kept_include[r]) continue;
                       auto lp = log_probs.row(r);
                       auto dst = gl.row(r);
                       const auto y = static_cast<std::size_t>(kept_targets[r]);
                       for (std::size_t c = 0; c < dst.size(); ++c) {
                         Scalar target_mass = uniform_weight;
                         if (c == y) target_mass += Scalar(1) - label_smoothing;
                         dst[c] += upstream * (std::exp(lp[c]) - target_mass);
                       }
                     }
                   });
}

RENEWNAT_NAMESPACE_END
