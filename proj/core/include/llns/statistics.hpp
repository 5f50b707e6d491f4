// Copyright 2026 The llns authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

namespace llns::stats {

struct MeanError {
  double mean = 0.0;
  double stderr_ = 0.0;
};

// Mean with the standard error of contiguous batch means.
MeanError batch_means(std::span<const double> xs, int batches);
MeanError mean_stderr(std::span<const double> xs);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};
// One-sample Kolmogorov-Smirnov test against the standard normal.
KsResult ks_test_standard_normal(std::vector<double> xs);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

// Two-sided Student t critical value.
double t_critical(double confidence, double dof);

}  // namespace llns::stats
