// Copyright 2026 The llns authors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <Eigen/Dense>
#include <map>
#include <set>

#include "llns/diffusivity.hpp"
#include "llns/error.hpp"
#include "llns/fock_operators.hpp"
#include "oracle/dense.hpp"

using namespace llns;
using namespace llns::fock;

using oracle::compare_everywhere;
using oracle::fiber;

TEST_CASE("raising operator agrees with the direct formula on every tuple") {
  for (auto [d, N, norm] : {std::tuple{3, 1.5, MollifierNorm::sup},
                            std::tuple{3, 1.5, MollifierNorm::euclidean},
                            std::tuple{2, 3.0, MollifierNorm::euclidean}}) {
    const auto F = fiber(d, N, norm);
    for (int n = 1; n <= 2; ++n) {
      const auto terms = oracle::random_terms(n, F.K, F.pts, 4, 3 + n);
      const auto f = oracle::library_kernel(d, n, terms);
      const auto phi = oracle::oracle_kernel(terms);
      const auto out = apply_Aplus(f, F.p);
      CHECK(out.size() <= 500);
      const oracle::Function want = [&](const auto& k, const auto& l) {
        return oracle::aplus_at(phi, n, F.p, k, l);
      };
      CHECK(compare_everywhere(out, want, F, n + 1) < 1e-13);
    }
  }
}

TEST_CASE("raising sigma at N=2.5 matches a hand evaluation at one tuple") {
  const auto p = ModelParams::make(3, 1.0, 2.5);
  const WaveVector k(1, 0, 0);
  const auto out = apply_Aplus(sigma_kernel(k, 1), p);
  // Output tuple ((l1,k1),(l2,k2)) = ((x,(2,1,0)),(y,(-1,-1,0))) only has the
  // pairs (i,j) = (1,2),(2,1), both with k_i + k_j = k.
  const WaveVector k1(2, 1, 0), k2(-1, -1, 0);
  const auto a = basis::frame(k)[0];
  auto proj = [](const WaveVector& q, const Vec& v, int l) {
    double s = 0.0;
    for (int m = 0; m < 3; ++m) s += ((l == m) - double(q[l]) * q[m] / double(q.norm2())) * v[m];
    return s;
  };
  const Vec kv = k.as_real();
  const int l1 = 0, l2 = 1;
  const double v = proj(k1, kv, l1) * proj(k2, a, l2) + proj(k2, kv, l2) * proj(k1, a, l1);
  const cplx want = cplx(0.0, p.lambda_N() * kTwoPi / 2.0) * v;
  const std::vector<WaveVector> ks{k1, k2};
  const std::vector<int> ls{l1, l2};
  CHECK(std::abs(out.at(ls, ks) - want) < 1e-14);
  CHECK(std::abs(want) > 1e-3);
}

TEST_CASE("lowering operator agrees with the direct formula on every tuple") {
  for (auto [d, N, norm] : {std::tuple{3, 1.5, MollifierNorm::sup},
                            std::tuple{2, 3.0, MollifierNorm::euclidean}}) {
    const auto F = fiber(d, N, norm);
    for (int n = 2; n <= 3; ++n) {
      const auto terms = oracle::random_terms(n, F.K, F.pts, 5, 17 + n);
      const auto g = oracle::library_kernel(d, n, terms);
      const auto phi = oracle::oracle_kernel(terms);
      const auto out = apply_Aminus(g, F.p);
      const oracle::Function want = [&](const auto& k, const auto& l) {
        return oracle::aminus_at(phi, n, F.p, k, l, F.pts);
      };
      CHECK(compare_everywhere(out, want, F, n - 1) < 1e-13);
    }
  }
}

TEST_CASE("degree edge cases") {
  const auto p = ModelParams::make(3, 1.0, 2.5);
  const auto low = apply_Aminus(sigma_kernel(WaveVector(1, 0, 0), 1), p);
  CHECK(low.empty());
  CHECK(low.degree() == 1);
}

TEST_CASE("adjointness, preservation and skew structure for degrees 1..4") {
  for (auto [d, N] : {std::pair{3, 1.5}, std::pair{3, 2.5}, std::pair{2, 4.0}}) {
    const auto p = ModelParams::make(d, 1.0, N, 4);
    const auto pts = *ball_points(p);
    const WaveVector K = d == 2 ? WaveVector(1, 1) : WaveVector(1, 1, 0);
    for (int n = 1; n <= 4; ++n) {
      if (d == 3 && N > 2.0 && n > 2) continue;
      CAPTURE(d);
      CAPTURE(N);
      CAPTURE(n);
      const auto f = random_kernel(n, K, pts, 6, 100 + n);
      const auto g = apply_Aplus(random_kernel(n, K, pts, 6, 200 + n), p) +
                     random_kernel(n + 1, K, pts, 6, 300 + n);
      const auto Af = apply_Aplus(f, p);
      const auto Ag = apply_Aminus(g, p);
      const cplx lhs = inner(Af, g), rhs = -inner(f, Ag);
      REQUIRE(std::abs(lhs) > 0.0);
      CHECK(std::abs(lhs - rhs) <= 1e-11 * std::abs(lhs));
      CHECK(symmetry_defect(Af) <= 1e-12 * max_abs(Af));
      CHECK(divergence_defect(Af) <= 1e-12 * max_abs(Af) * N);
      CHECK(symmetry_defect(Ag) <= 1e-12 * max_abs(Ag));
      CHECK(divergence_defect(Ag) <= 1e-12 * max_abs(Ag) * N);
      CHECK(Af.momentum() == K);

      FockVector v(d, n, n + 1);
      v.at(n) = f;
      v.at(n + 1) = g;
      CHECK(std::abs(inner(v, apply_A(v, p)).real()) <= 1e-12 * norm2(v));
      const auto Tf = apply_T(Sign::plus, f, p);
      CHECK(std::abs(inner(Tf, g) + inner(f, apply_T(Sign::minus, g, p))) <=
            1e-11 * std::abs(inner(Tf, g)));
    }
  }
}

TEST_CASE("momentum commutes with both operators") {
  const auto p = ModelParams::make(3, 1.0, 2.5, 3);
  const auto pts = *ball_points(p);
  const auto f = random_kernel(2, WaveVector(1, 0, 1), pts, 6, 5);
  const auto g = random_kernel(3, WaveVector(1, 0, 1), pts, 6, 6);
  for (int i = 0; i < 3; ++i) {
    const auto a = apply_momentum(i, apply_Aplus(f, p));
    CHECK(max_abs(a - apply_Aplus(apply_momentum(i, f), p)) <= 1e-12 * std::max(1.0, max_abs(a)));
    const auto b = apply_momentum(i, apply_Aminus(g, p));
    CHECK(max_abs(b - apply_Aminus(apply_momentum(i, g), p)) <= 1e-12 * std::max(1.0, max_abs(b)));
  }
}

TEST_CASE("lowering a fixed d=2 kernel shrinks as N doubles") {
  const auto f = sym_pair(sigma_kernel(WaveVector(1, 0), 1), sigma_kernel(WaveVector(1, 2), 1));
  double prev = 1e300;
  for (double N : {8.0, 16.0, 32.0, 64.0}) {
    const double v = norm2(apply_L0_power(apply_Aminus(f, ModelParams::make(2, 1.0, N)), -0.5));
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("sector bound holds with one constant across N and degree") {
  const double c1 = diffusivity::sector_constant_fit(ModelParams::make(3, 1.0, 2.5), WaveVector(1, 0, 0), 3, 6, 1);
  const double c2 = diffusivity::sector_constant_fit(ModelParams::make(3, 1.0, 4.5), WaveVector(1, 0, 0), 3, 6, 1);
  const double c3 = diffusivity::sector_constant_fit(ModelParams::make(2, 1.0, 16), WaveVector(1, 0), 3, 6, 1);
  MESSAGE("fitted sector constants " << c1 << " " << c2 << " " << c3);
  CHECK(c1 > 0.0);
  CHECK(c2 > 0.0);
  CHECK(std::max(c1, c2) < 4.0 * std::min(c1, c2));
  CHECK(c3 > 0.0);
}

TEST_CASE("resolvent with zero coupling is a diagonal division") {
  const auto p = ModelParams::make(3, 0.0, 2.5, 3);
  const auto pts = *ball_points(p);
  auto rhs = FockVector(3, 2, 3);
  rhs.at(2) = random_kernel(2, WaveVector(1, 0, 0), pts, 5, 3);
  rhs.at(3) = random_kernel(3, WaveVector(1, 0, 0), pts, 5, 4);
  const auto res = resolvent_solve(rhs, p);
  const auto want = apply_L0_power(rhs, -1.0);
  CHECK(norm2(combine(1.0, res.solution, -1.0, want)) <= 1e-20 * norm2(want));
}

TEST_CASE("resolvent matches a dense solve on the enumerated fiber") {
  // d=3, N=1.5, n=3 in the orthonormal basis of symmetric products of sigmas.
  const auto p = ModelParams::make(3, 2.0, 1.5, 3).with_norm(MollifierNorm::euclidean);
  const WaveVector K(1, 0, 0);
  const oracle::DenseResolvent dense(p, K);
  MESSAGE("dense basis sizes " << dense.size(0) << " + " << dense.size(1));
  CHECK(dense.orthonormality_error < 1e-12);

  SolverOptions opts;
  opts.tolerance = 1e-12;
  const auto lib = diffusivity::D_truncated(p, K, basis::FrameRule::first_axis, opts);
  CHECK(std::abs(lib.value - dense.D) <= 1e-8 * std::abs(dense.D));
  CHECK(std::abs(lib.imag) <= 1e-10 * std::abs(dense.D));

  // Coordinates of the library solution in the dense basis.
  const auto rhs_lib = FockVector::single(apply_Aplus(sigma_kernel(K, 1), p), 2, 3);
  const auto sol = resolvent_solve(rhs_lib, p, opts).solution;
  Eigen::VectorXcd y(dense.solution.size());
  for (int bi = 0; bi < 2; ++bi) {
    const auto& kern = sol.at(dense.blocks[std::size_t(bi)].n);
    const oracle::Function f = [&](const auto& k, const auto& l) { return kern.at(l, k); };
    y.segment(dense.offset(bi), Eigen::Index(dense.size(bi))) = dense.coordinates(bi, f);
  }
  CHECK((y - dense.solution).norm() <= 1e-8 * dense.solution.norm());
}

TEST_CASE("memory estimate covers a filled degree-3 fiber") {
  const auto p = ModelParams::make(3, 1.0, 4.5, 3).with_norm(MollifierNorm::euclidean);
  const auto s = sigma_kernel(WaveVector(1, 0, 0), 1);
  const auto v = apply_Aplus(apply_Aplus(s, p), p);
  CHECK(double(v.bytes()) <= estimate_kernel_bytes(p, 3));
  CHECK(estimate_kernel_bytes(p, 3) < 4.0 * double(v.bytes()));
}
