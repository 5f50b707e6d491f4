// Copyright 2026 The llns authors
// SPDX-License-Identifier: Apache-2.0
#include "llns/statistics.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <numeric>

#include "llns/error.hpp"

namespace llns::stats {

MeanError mean_stderr(std::span<const double> xs) {
  if (xs.size() < 2) throw InvalidInput("need at least two values for a standard error");
  const double n = double(xs.size());
  const double m = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : xs) ss += (v - m) * (v - m);
  return {m, std::sqrt(ss / (n - 1.0) / n)};
}

MeanError batch_means(std::span<const double> xs, int batches) {
  if (batches < 2 || xs.size() < std::size_t(batches)) {
    throw InvalidInput("batch means need >= 2 batches with one value each");
  }
  std::vector<double> means;
  const std::size_t per = xs.size() / std::size_t(batches);
  for (int b = 0; b < batches; ++b) {
    const auto first = xs.begin() + std::ptrdiff_t(std::size_t(b) * per);
    const auto last = b == batches - 1 ? xs.end() : first + std::ptrdiff_t(per);
    means.push_back(std::accumulate(first, last, 0.0) / double(last - first));
  }
  MeanError r = mean_stderr(means);
  r.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / double(xs.size());
  return r;
}

KsResult ks_test_standard_normal(std::vector<double> xs) {
  if (xs.empty()) throw InvalidInput("KS test needs data");
  std::sort(xs.begin(), xs.end());
  const boost::math::normal_distribution<double> nd(0.0, 1.0);
  const double n = double(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double F = boost::math::cdf(nd, xs[i]);
    d = std::max({d, double(i + 1) / n - F, F - double(i) / n});
  }
  const double sn = std::sqrt(n);
  const double lam = (sn + 0.12 + 0.11 / sn) * d;
  double q = 0.0;
  if (lam < 1e-3) {
    q = 1.0;
  } else {
    for (int j = 1; j <= 100; ++j) {
      const double term = 2.0 * ((j % 2) ? 1.0 : -1.0) * std::exp(-2.0 * j * j * lam * lam);
      q += term;
      if (std::abs(term) < 1e-16) break;
    }
  }
  return {d, std::clamp(q, 0.0, 1.0)};
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 3) throw InvalidInput("line fit needs >= 3 points");
  const double n = double(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - f.intercept - f.slope * x[i];
    rss += r * r;
  }
  f.slope_stderr = std::sqrt(rss / (n - 2.0) / sxx);
  return f;
}

double t_critical(double confidence, double dof) {
  const boost::math::students_t_distribution<double> t(dof);
  return boost::math::quantile(t, 0.5 + confidence / 2.0);
}

}  // namespace llns::stats
