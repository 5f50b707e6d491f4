// Copyright 2026 The llns authors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <sstream>

#include "llns/chaos_kernel.hpp"
#include "llns/error.hpp"
#include "llns/fock_operators.hpp"
#include "llns/snapshot.hpp"
#include "oracle/build.hpp"

using namespace llns;
using namespace llns::fock;

TEST_CASE("sigma kernels are orthonormal and divergence-free") {
  const WaveVector k(1, 2, 0);
  CHECK(inner(sigma_kernel(k, 1), sigma_kernel(k, 1)).real() == doctest::Approx(1.0));
  CHECK(std::abs(inner(sigma_kernel(k, 1), sigma_kernel(k, 2))) < 1e-15);
  CHECK(divergence_defect(sigma_kernel(k, 2)) < 1e-15);
  CHECK(sigma_kernel(k, 1).momentum() == k);
  CHECK_THROWS_AS(sigma_kernel(k, 3), InvalidInput);
  CHECK_THROWS_AS(sigma_kernel(WaveVector(1, 1), 2), InvalidInput);
}

TEST_CASE("sym_pair normalisation") {
  const auto a = sigma_kernel(WaveVector(1, 0, 0), 1);
  const auto b = sigma_kernel(WaveVector(0, 1, 0), 1);
  CHECK(norm2(sym_pair(a, a)) == doctest::Approx(2.0));
  CHECK(norm2(sym_pair(a, b)) == doctest::Approx(1.0));
  CHECK(max_abs(sym_pair(a, b) - sym_pair(b, a)) == 0.0);
  CHECK(symmetry_defect(sym_pair(a, b)) == 0.0);
  CHECK(inner(a, sym_pair(a, b)) == cplx(0.0));
}

TEST_CASE("inner product matches a brute-force sum over ordered tuples") {
  for (int d : {2, 3}) {
    const auto p = ModelParams::make(d, 1.0, d == 2 ? 3.0 : 1.5);
    const auto pts = oracle::ball(p);
    const WaveVector K = d == 2 ? WaveVector(1, 0) : WaveVector(1, 0, 0);
    for (int n = 1; n <= 3; ++n) {
      const auto sf = oracle::random_terms(n, K, pts, 5, 11 + n);
      auto sg2 = oracle::random_terms(n, K, pts, 5, 99 + n);
      for (auto s : sf) {  // shared legs so the overlap is not empty
        s.w = s.w * cplx(0.3, -1.1);
        sg2.push_back(s);
      }
      const auto f = oracle::library_kernel(d, n, sf);
      const auto g = oracle::library_kernel(d, n, sg2);
      REQUIRE(f.size() <= 200);
      const auto tuples = oracle::ordered_tuples(pts, K, n);
      const cplx want =
          oracle::brute_inner(oracle::oracle_kernel(sf), oracle::oracle_kernel(sg2), n, d, tuples);
      CHECK(std::abs(want) > 1e-6);
      CHECK(std::abs(inner(f, g) - want) <= 1e-12 * std::abs(want));
      CHECK(std::abs(inner(g, f) - std::conj(inner(f, g))) < 1e-13);
      CHECK(norm2(f) >= 0.0);
    }
  }
}

TEST_CASE("mixed degrees are orthogonal") {
  const auto a = sigma_kernel(WaveVector(1, 0, 0), 1);
  CHECK(inner(a, sym_pair(a, a)) == cplx(0.0));
}

TEST_CASE("L0 powers") {
  const auto s = sigma_kernel(WaveVector(1, 0, 0), 1);
  const double w = kTwoPi * kTwoPi;
  CHECK(apply_L0_power(s, 1.0).block(0)[1].real() == doctest::Approx(w * s.block(0)[1].real()));
  const auto pair = sym_pair(s, sigma_kernel(WaveVector(0, 1, 0), 1));
  const auto scaled2 = apply_L0_power(pair, 1.0);
  CHECK(norm2(scaled2) == doctest::Approx(4.0 * w * w * norm2(pair)));
  const auto rt = apply_L0_power(apply_L0_power(pair, -0.5), 0.5);
  CHECK(max_abs(rt - pair) < 1e-14);
}

TEST_CASE("momentum operator acts as a scalar on a fiber") {
  const WaveVector K(1, 1, 0);
  const auto pts = oracle::ball(ModelParams::make(3, 1.0, 1.5));
  const auto f = oracle::library_kernel(3, 3, oracle::random_terms(3, K, pts, 4, 5));
  for (int i = 0; i < 3; ++i) CHECK(max_abs(apply_momentum(i, f) - scaled(f, double(K[i]))) < 1e-14);
  CHECK(max_abs(apply_momentum(0, apply_L0_power(f, 1.0)) -
                apply_L0_power(apply_momentum(0, f), 1.0)) < 1e-10);
}

TEST_CASE("declared momentum is checked") {
  auto f = sym_pair(sigma_kernel(WaveVector(1, 0, 0), 1), sigma_kernel(WaveVector(0, 1, 0), 1));
  CHECK_NOTHROW(f.declare_momentum(WaveVector(1, 1, 0)));
  CHECK_THROWS_AS(f.declare_momentum(WaveVector(1, 0, 0)), InvalidInput);
}

TEST_CASE("snapshot round trip is exact") {
  const WaveVector K(0, 1, 1);
  const auto pts = oracle::ball(ModelParams::make(3, 1.0, 2.5));
  auto f = oracle::library_kernel(3, 3, oracle::random_terms(3, K, pts, 6, 21));
  f = scaled(f, cplx(1.0 / 3.0, std::sqrt(2.0)));
  std::stringstream ss;
  write_snapshot(ss, f, {2.5, 0.7});
  const auto back = read_snapshot(ss);
  CHECK(back.meta.N == 2.5);
  CHECK(back.meta.lambda == 0.7);
  REQUIRE(back.kernel.size() == f.size());
  CHECK(back.kernel.values() == f.values());
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(back.kernel.key(i) == f.key(i));

  std::stringstream bad("{\"format\":\"llns.kernel\",\"version\":1,\"d\":3,\"n\":2,\"N\":1.5,"
                        "\"lambda\":1,\"K\":null}\ndegree,d,tuple,re,im\n2,3,1 0 0@0,1,0\n");
  CHECK_THROWS_AS(read_snapshot(bad), InvalidInput);
}
