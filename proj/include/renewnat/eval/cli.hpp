// Copyright 2026 The renewnat Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef RENEWNAT_EVAL_CLI_HPP_
#define RENEWNAT_EVAL_CLI_HPP_

#include <iosfwd>
#include <string>
#include <vector>

#include "renewnat/base.hpp"

RENEWNAT_NAMESPACE_BEGIN

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

// Runs one subcommand; `args` excludes the program name. Diagnostics go to
// `err` as a single line.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

RENEWNAT_NAMESPACE_END

#endif  // RENEWNAT_EVAL_CLI_HPP_
