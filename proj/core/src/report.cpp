// Copyright 2026 The llns authors
// SPDX-License-Identifier: Apache-2.0
#include "llns/report.hpp"

#include <fmt/format.h>

#include <cmath>
#include <nlohmann/json.hpp>

#include "llns/error.hpp"
#include "llns/format.hpp"

namespace llns {

std::string to_string(Method m) {
  switch (m) {
    case Method::closed_form: return "closed-form";
    case Method::quadrature: return "quadrature";
    case Method::monte_carlo: return "monte-carlo";
    case Method::lattice: return "lattice";
    case Method::resolvent: return "resolvent";
    case Method::simulation: return "simulation";
  }
  return "closed-form";
}

Method parse_method(const std::string& s) {
  for (Method m : {Method::closed_form, Method::quadrature, Method::monte_carlo, Method::lattice,
                   Method::resolvent, Method::simulation}) {
    if (to_string(m) == s) return m;
  }
  throw InvalidInput("unknown method '" + s + "'");
}

void ConstantsReport::add(ConstantEntry e) {
  if (e.name.empty()) throw InvalidInput("report entry needs a name");
  if (!(e.uncertainty >= 0.0)) throw InvalidInput("uncertainty of '" + e.name + "' must be >= 0");
  entries_.push_back(std::move(e));
}

const ConstantEntry& ConstantsReport::at(const std::string& name) const {
  for (const auto& e : entries_) {
    if (e.name == name) return e;
  }
  throw InvalidInput("no report entry '" + name + "'");
}

namespace {

// Doubles go out as shortest round-trip strings parsed back as raw numbers.
nlohmann::json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return nlohmann::json::parse(shortest(v));
}

}  // namespace

std::string ConstantsReport::to_json() const {
  nlohmann::ordered_json out;
  out["schema"] = "llns.constants";
  out["version"] = kSchemaVersion;
  auto arr = nlohmann::ordered_json::array();
  for (const auto& e : entries_) {
    nlohmann::ordered_json j;
    j["name"] = e.name;
    j["value"] = number(e.value);
    j["method"] = to_string(e.method);
    j[e.kind == Uncertainty::stderr_ ? "stderr" : "tolerance"] = number(e.uncertainty);
    j["anchor"] = e.anchor;
    auto p = nlohmann::ordered_json::object();
    for (const auto& [k, v] : e.params) p[k] = number(v);
    j["params"] = p;
    arr.push_back(std::move(j));
  }
  out["entries"] = std::move(arr);
  return out.dump(2) + "\n";
}

ConstantsReport ConstantsReport::from_json(const std::string& text) {
  nlohmann::json in;
  try {
    in = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("constants report: ") + e.what());
  }
  if (in.value("schema", "") != "llns.constants") throw InvalidInput("not a constants report");
  ConstantsReport r;
  try {
    for (const auto& j : in.at("entries")) {
      ConstantEntry e;
      e.name = j.at("name").get<std::string>();
      e.value = j.at("value").is_null() ? NAN : j.at("value").get<double>();
      e.method = parse_method(j.at("method").get<std::string>());
      if (j.contains("stderr")) {
        e.kind = Uncertainty::stderr_;
        e.uncertainty = j.at("stderr").get<double>();
      } else {
        e.uncertainty = j.at("tolerance").get<double>();
      }
      e.anchor = j.at("anchor").get<std::string>();
      for (const auto& [k, v] : j.at("params").items()) e.params[k] = v.get<double>();
      r.add(std::move(e));
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("constants report: ") + e.what());
  }
  return r;
}

std::string ConstantsReport::to_table() const {
  std::string out = fmt::format("{:<36} {:>16} {:>12}  {:<11} {}\n", "name", "value",
                                "+/-", "method", "anchor");
  for (const auto& e : entries_) {
    out += fmt::format("{:<36} {:>16.10g} {:>12.3g}  {:<11} {}\n", e.name, e.value, e.uncertainty,
                       to_string(e.method), e.anchor);
  }
  return out;
}

}  // namespace llns
