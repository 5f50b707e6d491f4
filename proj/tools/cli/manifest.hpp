// Copyright 2026 The llns authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <map>
#include <nlohmann/json.hpp>
#include <string>

namespace llns::cli {

using Json = nlohmann::ordered_json;

std::string sha256_file(const std::filesystem::path& file);

struct RunManifest {
  static constexpr int kSchemaVersion = 1;

  std::string command;
  Json params;
  std::uint64_t seed = 0;
  std::string code_version;
  double wall_clock_seconds = 0.0;
  std::string started_utc;
  std::map<std::string, std::string> outputs;  // file name -> sha256

  Json to_json() const;
  static RunManifest from_json(const Json& j);
  static RunManifest load(const std::filesystem::path& file);
  void save(const std::filesystem::path& file) const;
};

std::string code_version();
std::string utc_now();

}  // namespace llns::cli

namespace llns::cli {
std::string sha256_string(const std::string& data);
}  // namespace llns::cli
