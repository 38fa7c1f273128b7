// Copyright 2026 The renewnat Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef RENEWNAT_EVAL_RUN_CONFIG_HPP_
#define RENEWNAT_EVAL_RUN_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "renewnat/decoding/decode.hpp"

RENEWNAT_NAMESPACE_BEGIN

struct RunConfig {
  ModelConfig model;
  TrainConfig train;
  DecodeConfig decode;
  std::uint64_t seed = 1;
  std::uint64_t steps = 1000;
  std::size_t min_count = 1;
  std::size_t log_every = 100;
  std::size_t beam = 5;
};

// Flat `key = value` lines; '#' starts a comment. Unknown keys, duplicate
// keys and unparsable values raise ConfigError naming the line.
RunConfig parse_run_config(std::string_view text, const std::string& origin = "<config>");
RunConfig load_run_config(const std::filesystem::path& path);

// Every key, one per line, in a fixed order; parse_run_config(format(c)) == c.
std::string format_run_config(const RunConfig& config);

RENEWNAT_NAMESPACE_END

#endif  // RENEWNAT_EVAL_RUN_CONFIG_HPP_
