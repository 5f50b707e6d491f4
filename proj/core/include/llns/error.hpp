// Copyright 2026 The llns authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace llns {

// Rejected input: bad parameters, malformed fields, schema violations.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A computation ran but could not deliver a trustworthy answer.
class ComputationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Iterative solver ran out of budget.
class ConvergenceError : public ComputationError {
 public:
  ConvergenceError(const std::string& what, double residual, int iterations)
      : ComputationError(what), residual_(residual), iterations_(iterations) {}
  double residual() const noexcept { return residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

// Requested instance would exceed the memory budget.
class ResourceLimit : public ComputationError {
 public:
  ResourceLimit(const std::string& what, double estimated_bytes)
      : ComputationError(what), estimated_bytes_(estimated_bytes) {}
  double estimated_bytes() const noexcept { return estimated_bytes_; }

 private:
  double estimated_bytes_;
};

}  // namespace llns
