// Copyright 2026 The llns authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cli/manifest.hpp"

namespace llns::cli {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  Json metrics = Json::object();
};

inline const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names{"adjointness", "commutation", "g-ode",
                                              "replacement", "corollary", "decoupling"};
  return names;
}

CheckResult check_adjointness(std::uint64_t seed);
CheckResult check_commutation(std::uint64_t seed);
CheckResult check_g_ode();
CheckResult check_replacement(const std::vector<double>& Ns, std::uint64_t seed);
CheckResult check_corollary(std::uint64_t mc_samples, std::uint64_t seed, int partitions);
CheckResult check_decoupling(const std::vector<double>& Ns);

}  // namespace llns::cli
