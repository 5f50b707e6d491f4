// Copyright 2026 The llns authors
// SPDX-License-Identifier: Apache-2.0
#include "cli/manifest.hpp"

#include <fmt/format.h>
#include <openssl/evp.h>

#include <array>
#include <chrono>
#include <ctime>
#include <fstream>
#include <memory>

#include "llns/error.hpp"

#ifndef LLNS_VERSION
#define LLNS_VERSION "0.0.0"
#endif

namespace llns::cli {

std::string sha256_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ComputationError("cannot read " + file.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw ComputationError("sha256 init failed");
  }
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), std::streamsize(buf.size()));
    const auto got = in.gcount();
    if (got > 0) EVP_DigestUpdate(ctx.get(), buf.data(), std::size_t(got));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md.data(), &len);
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", md[i]);
  return hex;
}

std::string code_version() { return std::string("llns ") + LLNS_VERSION; }

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::array<char, 32> buf{};
  std::strftime(buf.data(), buf.size(), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf.data();
}

Json RunManifest::to_json() const {
  Json j;
  j["schema"] = "llns.manifest";
  j["version"] = kSchemaVersion;
  j["command"] = command;
  j["params"] = params;
  j["seed"] = seed;
  j["code_version"] = code_version;
  j["started_utc"] = started_utc;
  j["wall_clock_seconds"] = wall_clock_seconds;
  Json out = Json::object();
  for (const auto& [name, digest] : outputs) out[name] = {{"sha256", digest}};
  j["outputs"] = out;
  return j;
}

RunManifest RunManifest::from_json(const Json& j) {
  RunManifest m;
  try {
    if (j.at("schema").get<std::string>() != "llns.manifest") {
      throw InvalidInput("not a run manifest");
    }
    m.command = j.at("command").get<std::string>();
    m.params = j.at("params");
    m.seed = j.at("seed").get<std::uint64_t>();
    m.code_version = j.at("code_version").get<std::string>();
    m.started_utc = j.value("started_utc", "");
    m.wall_clock_seconds = j.value("wall_clock_seconds", 0.0);
    for (const auto& [name, v] : j.at("outputs").items()) {
      m.outputs[name] = v.at("sha256").get<std::string>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("manifest: ") + e.what());
  }
  return m;
}

RunManifest RunManifest::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw InvalidInput("cannot open manifest " + file.string());
  try {
    return from_json(Json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidInput("manifest " + file.string() + ": " + e.what());
  }
}

void RunManifest::save(const std::filesystem::path& file) const {
  std::ofstream out(file);
  if (!out) throw ComputationError("cannot write " + file.string());
  out << to_json().dump(2) << '\n';
}

}  // namespace llns::cli

namespace llns::cli {

std::string sha256_string(const std::string& data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw ComputationError("sha256 failed");
  }
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", md[i]);
  return hex;
}

}  // namespace llns::cli
