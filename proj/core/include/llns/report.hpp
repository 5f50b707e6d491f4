// Copyright 2026 The llns authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>
#include <vector>

namespace llns {

enum class Method { closed_form, quadrature, monte_carlo, lattice, resolvent, simulation };
std::string to_string(Method m);
Method parse_method(const std::string& s);

enum class Uncertainty { stderr_, tolerance };

struct ConstantEntry {
  std::string name;
  double value = 0.0;
  Method method = Method::closed_form;
  double uncertainty = 0.0;
  Uncertainty kind = Uncertainty::tolerance;
  std::string anchor;
  std::map<std::string, double> params;
};

class ConstantsReport {
 public:
  static constexpr int kSchemaVersion = 1;

  void add(ConstantEntry e);
  const std::vector<ConstantEntry>& entries() const { return entries_; }
  // Throws InvalidInput when no entry has that name.
  const ConstantEntry& at(const std::string& name) const;

  std::string to_json() const;
  static ConstantsReport from_json(const std::string& text);
  std::string to_table() const;

 private:
  std::vector<ConstantEntry> entries_;
};

}  // namespace llns
