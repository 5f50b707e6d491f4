// Copyright 2026 The llns authors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <vector>

#include "llns/philox.hpp"
#include "llns/statistics.hpp"

using namespace llns;

TEST_CASE("Philox4x32-10 known answers") {
  // Published Random123 test vectors.
  CHECK(rng::philox4x32({0, 0, 0, 0}, {0, 0}) ==
        rng::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(rng::philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                        {0xffffffffu, 0xffffffffu}) ==
        rng::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(rng::philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                        {0xa4093822u, 0x299f31d0u}) ==
        rng::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("uniforms lie in (0,1] and streams are reproducible") {
  rng::Stream a(42, 3), b(42, 3), c(42, 4);
  double sum = 0.0;
  bool differs = false;
  for (int i = 0; i < 100000; ++i) {
    const double u = a.uniform();
    CHECK_MESSAGE(u > 0.0, i);
    CHECK_MESSAGE(u <= 1.0, i);
    CHECK(u == b.uniform());
    differs = differs || u != c.uniform();
    sum += u;
  }
  CHECK(differs);
  CHECK(sum / 100000 == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("normals pass a Kolmogorov-Smirnov test") {
  rng::Stream s(9, 0);
  std::vector<double> x(20000);
  for (auto& v : x) v = s.normal();
  const auto ks = stats::ks_test_standard_normal(x);
  CHECK(ks.p_value > 0.01);
  for (auto& v : x) v += 0.1;
  CHECK(stats::ks_test_standard_normal(x).p_value < 1e-4);
}

TEST_CASE("KS statistic matches a direct empirical-CDF computation") {
  std::vector<double> x{-1.2, 0.3, 0.31, 2.0, -0.5};
  boost::math::normal_distribution<> n;
  std::vector<double> s = x;
  std::sort(s.begin(), s.end());
  double D = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double F = boost::math::cdf(n, s[i]);
    D = std::max({D, double(i + 1) / s.size() - F, F - double(i) / s.size()});
  }
  CHECK(stats::ks_test_standard_normal(x).statistic == doctest::Approx(D).epsilon(1e-14));
}

TEST_CASE("batch means and line fits") {
  std::vector<double> x{1, 2, 3, 4, 5, 6, 7, 8};
  const auto m = stats::mean_stderr(x);
  CHECK(m.mean == doctest::Approx(4.5));
  CHECK(m.stderr_ == doctest::Approx(std::sqrt(6.0 / 8.0)));
  const auto b = stats::batch_means(x, 4);
  CHECK(b.mean == doctest::Approx(4.5));
  CHECK(b.stderr_ == doctest::Approx(std::sqrt((9.0 + 1.0 + 1.0 + 9.0) / 3.0 / 4.0)));
  std::vector<double> t{0, 1, 2, 3, 4}, y{1, 3, 5, 7, 9};
  const auto f = stats::fit_line(t, y);
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.intercept == doctest::Approx(1.0));
  CHECK(f.slope_stderr == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(stats::t_critical(0.95, 1e6) == doctest::Approx(1.95996).epsilon(1e-4));
}
