// Copyright 2026 The renewnat Authors.
// SPDX-License-Identifier: Apache-2.0

#include "renewnat/data/batch.hpp"

#include <algorithm>

RENEWNAT_NAMESPACE_BEGIN

namespace {

void pad_into(PaddedTokens& grid, std::vector<std::uint8_t>& pad_mask,
              const std::vector<std::vector<TokenId>>& rows) {
  grid.batch = rows.size();
  grid.len = 0;
  for (const auto& r : rows) grid.len = std::max(grid.len, r.size());
  grid.ids.assign(grid.batch * grid.len, kPadId);
  pad_mask.assign(grid.batch * grid.len, 1);
  grid.lengths.clear();
  for (std::size_t b = 0; b < rows.size(); ++b) {
    std::copy(rows[b].begin(), rows[b].end(), grid.ids.begin() + static_cast<std::ptrdiff_t>(b * grid.len));
    std::fill_n(pad_mask.begin() + static_cast<std::ptrdiff_t>(b * grid.len), rows[b].size(), 0);
    grid.lengths.push_back(rows[b].size());
  }
}

}  // namespace

Batch make_batch(const std::vector<SentencePair>& pairs) {
  if (pairs.empty()) throw LengthError("make_batch: no pairs");
  std::vector<std::vector<TokenId>> sources;
  std::vector<std::vector<TokenId>> targets;
  sources.reserve(pairs.size());
  targets.reserve(pairs.size());
  for (const auto& p : pairs) {
    if (p.source.empty() || p.target.empty()) throw LengthError("make_batch: empty sentence");
    std::vector<TokenId> src;
    src.reserve(p.source.size() + 1);
    src.push_back(kLengthId);
    src.insert(src.end(), p.source.begin(), p.source.end());
    sources.push_back(std::move(src));
    targets.push_back(p.target);
  }
  Batch batch;
  pad_into(batch.source, batch.source_pad, sources);
  pad_into(batch.target, batch.target_pad, targets);
  return batch;
}

std::vector<SentencePair> unbatch(const Batch& batch) {
  std::vector<SentencePair> out(batch.size());
  for (std::size_t b = 0; b < batch.size(); ++b) {
    auto src = batch.source.sequence(b);
    out[b].source.assign(src.begin() + 1, src.end());
    auto tgt = batch.target.sequence(b);
    out[b].target.assign(tgt.begin(), tgt.end());
  }
  return out;
}

RENEWNAT_NAMESPACE_END
