// Copyright 2026 The llns authors
// SPDX-License-Identifier: Apache-2.0
#include "llns/format.hpp"

#include <array>
#include <charconv>

#include "llns/error.hpp"

namespace llns {

std::string shortest(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

double parse_double(std::string_view s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw InvalidInput("not a number: '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace llns
