// Copyright 2026 The renewnat Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef RENEWNAT_DATA_VOCABULARY_HPP_
#define RENEWNAT_DATA_VOCABULARY_HPP_

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "renewnat/data/batch.hpp"

RENEWNAT_NAMESPACE_BEGIN

inline constexpr std::array<std::string_view, kReservedTokens> kReservedLiterals = {
    "<pad>", "<unk>", "<mask>", "<length>", "<bos>", "<eos>"};

std::vector<std::string> split_whitespace(std::string_view line);

class Vocabulary {
 public:
  // Reserved tokens only.
  Vocabulary();

  // Tokens with count >= min_count, ordered by descending count then
  // lexicographically. Throws Error if the lines hold no tokens.
  static Vocabulary build(std::span<const std::string> lines, std::size_t min_count = 1);
  static Vocabulary build_from_files(std::span<const std::filesystem::path> files,
                                     std::size_t min_count = 1);

  static Vocabulary load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  std::size_t size() const { return tokens_.size(); }
  // kUnkId for unknown tokens and for reserved literals found in text.
  TokenId id(std::string_view token) const;
  const std::string& token(TokenId id) const;

  std::vector<TokenId> encode(std::string_view line) const;
  std::string decode(std::span<const TokenId> ids) const;

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) { return a.tokens_ == b.tokens_; }

 private:
  void add(std::string token);

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> index_;
};

RENEWNAT_NAMESPACE_END

#endif  // RENEWNAT_DATA_VOCABULARY_HPP_
