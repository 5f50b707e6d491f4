// Copyright 2026 The llns authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>

namespace llns {

// Shortest decimal that parses back to the same double.
std::string shortest(double v);
// Throws InvalidInput on anything but a complete number.
double parse_double(std::string_view s);

}  // namespace llns
