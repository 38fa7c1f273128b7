// Copyright 2026 The renewnat Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Binary layout, all integers little-endian:
//   "RNAT" | version u32 | array count u32
//   per array: name length u16 | name bytes | rank u8 | dims u64 x rank |
//              float32 payload
//   CRC-32 (zlib polynomial) of every preceding byte, u32

#ifndef RENEWNAT_EVAL_CHECKPOINT_HPP_
#define RENEWNAT_EVAL_CHECKPOINT_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "renewnat/data/vocabulary.hpp"
#include "renewnat/eval/run_config.hpp"
#include "renewnat/numerics/parameter_store.hpp"

RENEWNAT_NAMESPACE_BEGIN

inline constexpr std::uint32_t kCheckpointVersion = 1;

std::vector<std::uint8_t> serialize_parameters(const ParameterStore& store);
// Throws IoError on a bad magic, version, CRC or truncated payload.
ParameterStore deserialize_parameters(const std::vector<std::uint8_t>& bytes);

void save_parameters(const std::filesystem::path& path, const ParameterStore& store);
ParameterStore load_parameters(const std::filesystem::path& path);

// Trailing CRC-32 of a checkpoint file.
std::uint32_t checkpoint_crc(const std::filesystem::path& path);

// A checkpoint plus its sidecars <path>.vocab and <path>.cfg.
struct ModelBundle {
  RunConfig config;
  Vocabulary vocab;
  ParameterStore params;
};

void save_bundle(const std::filesystem::path& path, const ModelBundle& bundle);
ModelBundle load_bundle(const std::filesystem::path& path);

RENEWNAT_NAMESPACE_END

#endif  // RENEWNAT_EVAL_CHECKPOINT_HPP_
