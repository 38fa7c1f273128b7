// Copyright 2026 The renewnat Authors.
// SPDX-License-Identifier: Apache-2.0

#include "renewnat/eval/run_config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <vector>

RENEWNAT_NAMESPACE_BEGIN

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::uint64_t to_uint(const std::string& v) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw ConfigError("expected a non-negative integer, got '" + v + "'");
  return out;
}

double to_double(const std::string& v) {
  std::size_t used = 0;
  double out = 0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty()) throw ConfigError("expected a number, got '" + v + "'");
  return out;
}

bool to_bool(const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("expected true/false, got '" + v + "'");
}

std::string from_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Field {
  const char* key;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

template <typename T>
Field size_field(const char* key, T RunConfig::*group, std::size_t T::*member) {
  return {key, [=](const RunConfig& c) { return std::to_string(c.*group.*member); },
          [=](RunConfig& c, const std::string& v) { (c.*group).*member = static_cast<std::size_t>(to_uint(v)); }};
}

template <typename T>
Field u64_field(const char* key, T RunConfig::*group, std::uint64_t T::*member) {
  return {key, [=](const RunConfig& c) { return std::to_string(c.*group.*member); },
          [=](RunConfig& c, const std::string& v) { (c.*group).*member = to_uint(v); }};
}

template <typename T>
Field double_field(const char* key, T RunConfig::*group, double T::*member) {
  return {key, [=](const RunConfig& c) { return from_double(c.*group.*member); },
          [=](RunConfig& c, const std::string& v) { (c.*group).*member = to_double(v); }};
}

template <typename T>
Field bool_field(const char* key, T RunConfig::*group, bool T::*member) {
  return {key, [=](const RunConfig& c) { return std::string(c.*group.*member ? "true" : "false"); },
          [=](RunConfig& c, const std::string& v) { (c.*group).*member = to_bool(v); }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    using M = ModelConfig;
    using T = TrainConfig;
    using D = DecodeConfig;
    auto m = &RunConfig::model;
    auto t = &RunConfig::train;
    auto d = &RunConfig::decode;
    std::vector<Field> f;
    f.push_back({"model", [](const RunConfig& c) { return std::string(to_string(c.model.kind)); },
                 [](RunConfig& c, const std::string& v) { c.model.kind = parse_model_kind(v); }});
    f.push_back(size_field("vocab_size", m, &M::vocab_size));
    f.push_back(size_field("d_model", m, &M::d_model));
    f.push_back(size_field("n_heads", m, &M::n_heads));
    f.push_back(size_field("ffn_dim", m, &M::ffn_dim));
    f.push_back(size_field("enc_layers", m, &M::enc_layers));
    f.push_back(size_field("dec_layers", m, &M::dec_layers));
    f.push_back(size_field("mlm_layers", m, &M::mlm_layers));
    f.push_back(size_field("max_len", m, &M::max_len));
    f.push_back(double_field("dropout", m, &M::dropout));
    f.push_back(bool_field("tie_output", m, &M::tie_output));
    f.push_back({"copy_mode", [](const RunConfig& c) { return std::string(to_string(c.model.copy_mode)); },
                 [](RunConfig& c, const std::string& v) { c.model.copy_mode = parse_copy_mode(v); }});
    f.push_back(double_field("soft_copy_tau", m, &M::soft_copy_tau));
    f.push_back(size_field("length_offset_limit", m, &M::length_offset_limit));

    f.push_back(double_field("lr", t, &T::lr));
    f.push_back(u64_field("warmup_steps", t, &T::warmup_steps));
    f.push_back(double_field("beta1", t, &T::beta1));
    f.push_back(double_field("beta2", t, &T::beta2));
    f.push_back(double_field("adam_eps", t, &T::adam_eps));
    f.push_back(u64_field("total_steps", t, &T::total_steps));
    f.push_back(size_field("batch_tokens", t, &T::batch_tokens));
    f.push_back({"mlm_input", [](const RunConfig& c) { return std::string(to_string(c.train.mlm_input)); },
                 [](RunConfig& c, const std::string& v) { c.train.mlm_input = parse_mlm_input_strategy(v); }});
    f.push_back(double_field("mix_probability", t, &T::mix_probability));
    f.push_back(bool_field("glancing", t, &T::glancing));
    f.push_back(double_field("glancing_start", t, &T::glancing_start));
    f.push_back(double_field("glancing_end", t, &T::glancing_end));
    f.push_back(double_field("label_smoothing", t, &T::label_smoothing));
    f.push_back({"loss_weight_pot", [](const RunConfig& c) { return from_double(c.train.loss_weights.pot); },
                 [](RunConfig& c, const std::string& v) { c.train.loss_weights.pot = to_double(v); }});
    f.push_back({"loss_weight_mlm", [](const RunConfig& c) { return from_double(c.train.loss_weights.mlm); },
                 [](RunConfig& c, const std::string& v) { c.train.loss_weights.mlm = to_double(v); }});
    f.push_back({"loss_weight_len", [](const RunConfig& c) { return from_double(c.train.loss_weights.len); },
                 [](RunConfig& c, const std::string& v) { c.train.loss_weights.len = to_double(v); }});

    f.push_back(double_field("alpha", d, &D::alpha));
    f.push_back(double_field("delta", d, &D::delta));
    f.push_back({"distinguish_mode", [](const RunConfig& c) { return std::string(to_string(c.decode.mode)); },
                 [](RunConfig& c, const std::string& v) { c.decode.mode = parse_distinguish_mode(v); }});
    f.push_back(size_field("length_beam", d, &D::length_beam));
    f.push_back(size_field("max_decode_len", d, &D::max_len));
    f.push_back({"npd_scoring", [](const RunConfig& c) { return std::string(to_string(c.decode.scoring)); },
                 [](RunConfig& c, const std::string& v) { c.decode.scoring = parse_npd_scoring(v); }});

    f.push_back({"seed", [](const RunConfig& c) { return std::to_string(c.seed); },
                 [](RunConfig& c, const std::string& v) { c.seed = to_uint(v); }});
    f.push_back({"steps", [](const RunConfig& c) { return std::to_string(c.steps); },
                 [](RunConfig& c, const std::string& v) { c.steps = to_uint(v); }});
    f.push_back({"min_count", [](const RunConfig& c) { return std::to_string(c.min_count); },
                 [](RunConfig& c, const std::string& v) { c.min_count = static_cast<std::size_t>(to_uint(v)); }});
    f.push_back({"log_every", [](const RunConfig& c) { return std::to_string(c.log_every); },
                 [](RunConfig& c, const std::string& v) { c.log_every = static_cast<std::size_t>(to_uint(v)); }});
    f.push_back({"beam", [](const RunConfig& c) { return std::to_string(c.beam); },
                 [](RunConfig& c, const std::string& v) { c.beam = static_cast<std::size_t>(to_uint(v)); }});
    return f;
  }();
  return table;
}

}  // namespace

RunConfig parse_run_config(std::string_view text, const std::string& origin) {
  RunConfig config;
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const std::string where = origin + ":" + std::to_string(line_no) + ": ";
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    const Field* field = nullptr;
    for (const auto& f : fields()) {
      if (key == f.key) field = &f;
    }
    if (!field) throw ConfigError(where + "unknown key '" + key + "'");
    if (!seen.insert(key).second) throw ConfigError(where + "duplicate key '" + key + "'");
    try {
      field->set(config, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + key + ": " + e.what());
    }
  }
  return config;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str(), path.string());
}

std::string format_run_config(const RunConfig& config) {
  std::string out;
  for (const auto& f : fields()) out += std::string(f.key) + " = " + f.get(config) + "\n";
  return out;
}

RENEWNAT_NAMESPACE_END
