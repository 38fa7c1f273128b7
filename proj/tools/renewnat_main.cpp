// Copyright 2026 The renewnat Authors.
// SPDX-License-Identifier: Apache-2.0

#include <iostream>
#include <string>
#include <vector>

#include "renewnat/eval/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return renewnat::run_command(args, std::cout, std::cerr);
}
