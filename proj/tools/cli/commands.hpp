// Copyright 2026 The llns authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cli/manifest.hpp"

namespace llns::cli {

struct RunContext {
  std::filesystem::path out;
  std::optional<std::filesystem::path> cache_dir;
  std::ostream* log = nullptr;  // null discards progress output
};

struct CommandResult {
  int exit_code = 0;
  std::vector<std::string> outputs;  // file names inside the output directory
};

// Params are fully resolved JSON objects; they are what the manifest stores.
CommandResult run_coeff(const Json& params, const RunContext& ctx);
CommandResult run_verify(const Json& params, const RunContext& ctx);
CommandResult run_simulate(const Json& params, const RunContext& ctx);

// Fills defaults and validates a simulate config document. Throws InvalidInput
// naming the offending field.
Json resolve_simulate_config(const Json& config);

// Runs the command, then digests its outputs into manifest.json.
RunManifest execute(const std::string& command, const Json& params, const RunContext& ctx,
                    int& exit_code);

}  // namespace llns::cli
