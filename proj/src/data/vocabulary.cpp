// Copyright 2026 The renewnat Authors.
// SPDX-License-Identifier: Apache-2.0

#include "renewnat/data/vocabulary.hpp"

#include <algorithm>
#include <fstream>
#include <map>

RENEWNAT_NAMESPACE_BEGIN

std::vector<std::string> split_whitespace(std::string_view line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v'; };
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    const std::size_t start = i;
    while (i < line.size() && !is_space(line[i])) ++i;
    if (i > start) out.emplace_back(line.substr(start, i - start));
  }
  return out;
}

Vocabulary::Vocabulary() {
  for (auto literal : kReservedLiterals) add(std::string(literal));
}

void Vocabulary::add(std::string token) {
  index_.emplace(token, static_cast<TokenId>(tokens_.size()));
  tokens_.push_back(std::move(token));
}

Vocabulary Vocabulary::build(std::span<const std::string> lines, std::size_t min_count) {
  std::map<std::string, std::size_t> counts;
  for (const auto& line : lines) {
    for (auto& tok : split_whitespace(line)) ++counts[std::move(tok)];
  }
  if (counts.empty()) throw Error("build_vocab: empty corpus");
  std::vector<std::pair<std::string, std::size_t>> entries(counts.begin(), counts.end());
  std::stable_sort(entries.begin(), entries.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  Vocabulary vocab;
  for (auto& [tok, n] : entries) {
    if (n < min_count) continue;
    if (vocab.index_.count(tok)) continue;  // reserved literal
    vocab.add(tok);
  }
  return vocab;
}

Vocabulary Vocabulary::build_from_files(std::span<const std::filesystem::path> files,
                                        std::size_t min_count) {
  std::vector<std::string> lines;
  for (const auto& path : files) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    for (std::string line; std::getline(in, line);) lines.push_back(std::move(line));
  }
  return build(lines, min_count);
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read vocabulary " + path.string());
  Vocabulary vocab;
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line); ++line_no) {
    if (line_no < kReservedTokens) {
      if (line != kReservedLiterals[line_no]) {
        throw IoError(path.string() + ":" + std::to_string(line_no + 1) + ": expected reserved token " +
                      std::string(kReservedLiterals[line_no]));
      }
      continue;
    }
    if (line.empty() || vocab.index_.count(line)) {
      throw IoError(path.string() + ":" + std::to_string(line_no + 1) + ": empty or duplicate token");
    }
    vocab.add(line);
  }
  if (line_no < kReservedTokens) throw IoError(path.string() + ": missing reserved tokens");
  return vocab;
}

void Vocabulary::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write vocabulary " + path.string());
  for (const auto& tok : tokens_) out << tok << '\n';
}

TokenId Vocabulary::id(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end() || it->second < static_cast<TokenId>(kReservedTokens)) return kUnkId;
  return it->second;
}

const std::string& Vocabulary::token(TokenId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size()) {
    throw ShapeError("token id " + std::to_string(id) + " outside vocabulary of " +
                     std::to_string(tokens_.size()));
  }
  return tokens_[static_cast<std::size_t>(id)];
}

std::vector<TokenId> Vocabulary::encode(std::string_view line) const {
  std::vector<TokenId> ids;
  for (const auto& tok : split_whitespace(line)) ids.push_back(id(tok));
  return ids;
}

std::string Vocabulary::decode(std::span<const TokenId> ids) const {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ' ';
    out += token(ids[i]);
  }
  return out;
}

RENEWNAT_NAMESPACE_END
