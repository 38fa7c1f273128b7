// Copyright 2026 The renewnat Authors.
// SPDX-License-Identifier: Apache-2.0

#include "renewnat/eval/checkpoint.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

RENEWNAT_NAMESPACE_BEGIN

namespace {

static_assert(std::endian::native == std::endian::little, "checkpoint IO assumes a little-endian host");

class Writer {
 public:
  template <typename T>
  void put(T value) {
    const auto* p = reinterpret_cast<const std::uint8_t*>(&value);
    bytes.insert(bytes.end(), p, p + sizeof(T));
  }
  void put_bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const std::uint8_t*>(data);
    bytes.insert(bytes.end(), p, p + n);
  }
  std::vector<std::uint8_t> bytes;
};

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& bytes, std::size_t end) : bytes_(bytes), end_(end) {}

  template <typename T>
  T get() {
    T value;
    get_bytes(&value, sizeof(T));
    return value;
  }
  void get_bytes(void* out, std::size_t n) {
    if (n > end_ - pos_) throw IoError("checkpoint truncated at byte " + std::to_string(pos_));
    std::memcpy(out, bytes_.data() + pos_, n);
    pos_ += n;
  }
  bool done() const { return pos_ == end_; }

 private:
  const std::vector<std::uint8_t>& bytes_;
  std::size_t end_;
  std::size_t pos_ = 0;
};

std::uint32_t crc_of(const std::uint8_t* data, std::size_t n) {
  uLong crc = crc32(0L, Z_NULL, 0);
  return static_cast<std::uint32_t>(crc32(crc, data, static_cast<uInt>(n)));
}

}  // namespace

std::vector<std::uint8_t> serialize_parameters(const ParameterStore& store) {
  Writer w;
  w.put_bytes("RNAT", 4);
  w.put<std::uint32_t>(kCheckpointVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(store.size()));
  for (const Param& p : store) {
    if (p.name.size() > 0xffff) throw IoError("parameter name too long: " + p.name);
    w.put<std::uint16_t>(static_cast<std::uint16_t>(p.name.size()));
    w.put_bytes(p.name.data(), p.name.size());
    w.put<std::uint8_t>(static_cast<std::uint8_t>(p.value.rank()));
    for (std::size_t d : p.value.shape()) w.put<std::uint64_t>(d);
    for (Scalar x : p.value.data()) w.put<float>(static_cast<float>(x));
  }
  w.put<std::uint32_t>(crc_of(w.bytes.data(), w.bytes.size()));
  return std::move(w.bytes);
}

ParameterStore deserialize_parameters(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 16) throw IoError("checkpoint too short");
  const std::size_t body = bytes.size() - 4;
  std::uint32_t stored = 0;
  std::memcpy(&stored, bytes.data() + body, 4);
  if (stored != crc_of(bytes.data(), body)) throw IoError("checkpoint CRC mismatch");

  Reader r(bytes, body);
  char magic[4];
  r.get_bytes(magic, 4);
  if (std::memcmp(magic, "RNAT", 4) != 0) throw IoError("not a checkpoint (bad magic)");
  const auto version = r.get<std::uint32_t>();
  if (version != kCheckpointVersion) throw IoError("unsupported checkpoint version " + std::to_string(version));
  const auto count = r.get<std::uint32_t>();
  ParameterStore store;
  for (std::uint32_t i = 0; i < count; ++i) {
    std::string name(r.get<std::uint16_t>(), '\0');
    r.get_bytes(name.data(), name.size());
    Shape shape(r.get<std::uint8_t>());
    for (auto& d : shape) d = static_cast<std::size_t>(r.get<std::uint64_t>());
    Array value(shape);
    for (auto& x : value.data()) x = static_cast<Scalar>(r.get<float>());
    store.add(std::move(name), std::move(value));
  }
  if (!r.done()) throw IoError("trailing bytes in checkpoint");
  return store;
}

void save_parameters(const std::filesystem::path& path, const ParameterStore& store) {
  const auto bytes = serialize_parameters(store);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

namespace {

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

ParameterStore load_parameters(const std::filesystem::path& path) {
  try {
    return deserialize_parameters(read_bytes(path));
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

std::uint32_t checkpoint_crc(const std::filesystem::path& path) {
  const auto bytes = read_bytes(path);
  if (bytes.size() < 4) throw IoError(path.string() + ": too short");
  std::uint32_t crc = 0;
  std::memcpy(&crc, bytes.data() + bytes.size() - 4, 4);
  return crc;
}

void save_bundle(const std::filesystem::path& path, const ModelBundle& bundle) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  save_parameters(path, bundle.params);
  bundle.vocab.save(path.string() + ".vocab");
  std::ofstream cfg(path.string() + ".cfg", std::ios::binary);
  if (!cfg) throw IoError("cannot write " + path.string() + ".cfg");
  cfg << format_run_config(bundle.config);
}

ModelBundle load_bundle(const std::filesystem::path& path) {
  ModelBundle bundle{load_run_config(path.string() + ".cfg"), Vocabulary::load(path.string() + ".vocab"),
                     load_parameters(path)};
  if (bundle.config.model.vocab_size != bundle.vocab.size()) {
    throw IoError(path.string() + ": config vocab_size " + std::to_string(bundle.config.model.vocab_size) +
                  " does not match vocabulary of " + std::to_string(bundle.vocab.size()));
  }
  return bundle;
}

RENEWNAT_NAMESPACE_END
