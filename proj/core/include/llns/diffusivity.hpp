// Copyright 2026 The llns authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "llns/divfree_basis.hpp"
#include "llns/fock_operators.hpp"
#include "llns/model_params.hpp"

namespace llns::diffusivity {

// d=2 effective diffusivity sqrt(lambda^2/(8 pi) + 1) - 1.
double d2_effective_D(double lambda);

// G(x) = sqrt(x/(16 pi) + 1) - 1.
double replacement_G(double x);
// L^N(x) = lambda_N^2 log(1 + N^2/x), d=2 coupling.
double replacement_L(double x, const ModelParams& p);

// Exact lattice sum of the d=2 replacement kernel P^N(k_1..k_n).
double replacement_kernel_PN(const std::vector<WaveVector>& ks, const ModelParams& p);
// |P^N(k) - G(L^N((2 pi)^2 |k_{1:n}|^2))|.
double replacement_deviation(const std::vector<WaveVector>& ks, const ModelParams& p);

// Positive root of x(1+x) = c lambda^2.
double D_rep(double c, double lambda);
// sqrt(1 + lambda^2/pi).
double nu_eff(double lambda);

inline constexpr double kF1ClosedForm = 7.0 / (30.0 * kPi);
// Quoted value 8.588/(2 (2 pi)^4) of the second coefficient.
double f2_quoted();

// Spherical integral of the first coefficient (radius profile of the ball:
// Euclidean gives 7/(30 pi), sup gives the cube). k and a are unit, a . k = 0.
struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
};
QuadratureResult f1_sphere_quadrature(MollifierNorm norm, const Vec& k = {1, 0, 0},
                                      const Vec& a = {0, 1, 0}, double tol = 1e-12);

// ||T+* sigma_{k,1}||^2 at finite N (lambda stripped).
double f1_lattice(const ModelParams& p, const WaveVector& k,
                  basis::FrameRule rule = basis::FrameRule::first_axis);

// Two-point Richardson extrapolation in 1/N.
double richardson(double N1, double v1, double N2, double v2);

struct F1Routes {
  double closed_form = kF1ClosedForm;
  QuadratureResult quadrature;
  double lattice_N1 = 0.0, lattice_N2 = 0.0;
  double lattice_v1 = 0.0, lattice_v2 = 0.0;
  double lattice_extrapolated = 0.0;
};
F1Routes f1_d3(double N1 = 24.5, double N2 = 48.5,
               MollifierNorm norm = MollifierNorm::euclidean, bool with_lattice = true);

struct MonteCarloOptions {
  std::uint64_t accepted_samples = 10'000'000;
  std::uint64_t seed = 7;
  int partitions = 1;   // part of the determinism key
  int threads = 1;      // execution only
  int batches = 100;
  MollifierNorm norm = MollifierNorm::sup;
};

struct MonteCarloResult {
  double value = 0.0;
  double stderr_ = 0.0;
  std::uint64_t accepted = 0;
  std::uint64_t proposed = 0;
};

// Six-dimensional limit integral of the second coefficient, literal
// evaluation of the coefficient products with frames, permutation and
// frame-index sums; multi-channel importance sampling with rejection.
MonteCarloResult f2_d3(const MonteCarloOptions& opts);

// Integrand value (before division by the sampling density) at (x1, x2);
// zero outside the region.
double f2_integrand(const Vec& x1, const Vec& x2, MollifierNorm norm,
                    const Vec& k = {1, 0, 0}, const Vec& a = {0, 1, 0});

// Signed finite-(N,n) expansion coefficient (-1)^{l-1}||(T*_{2,n})^{l-1} T+* sigma||^2.
double fl_lattice(int l, const ModelParams& p, const WaveVector& k,
                  double memory_budget_bytes = 2.0e9);

// (1/((2 pi)^2 |k|^2)) <A+ sigma, (-L_{2,n})^{-1} A+ sigma>.
struct TruncatedD {
  double value = 0.0;
  double imag = 0.0;
  int iterations = 0;
  double residual = 0.0;
};
TruncatedD D_truncated(const ModelParams& p, const WaveVector& k,
                       basis::FrameRule rule = basis::FrameRule::first_axis,
                       const fock::SolverOptions& opts = {});

// Sum over paths of length a from degree 1 back to degree 1 inside
// degrees [2, n] of inner(sigma_{j',t'}, T_path sigma_{j,t}); lambda as given.
cplx path_sum(int a, const ModelParams& p, const WaveVector& j, int t,
              const WaveVector& jp, int tp);

// max over a randomized suite of ||(-L0)^{-1/2} A phi||^2 / (lambda^2 n ||(-L0)^{1/2} phi||^2).
double sector_constant_fit(const ModelParams& p, const WaveVector& K, int max_degree,
                           int samples, std::uint64_t seed);

struct CorollaryRow {
  double lambda;
  double first_order;  // 7 lambda^2/(30 pi)
  double nu_minus_one; // sqrt(1 + lambda^2/pi) - 1
  double d_rep;        // with c = 7/(30 pi)
  bool holds;
};

struct CorollaryReport {
  std::vector<CorollaryRow> rows;
  bool first_order_below_nu = true;
  double f2 = 0.0, f2_stderr = 0.0, f1_squared = 0.0;
  double gap_in_stderr = 0.0;
  bool second_order_gap = false;
  std::string failure;  // first failing lambda, empty when all pass
};

CorollaryReport corollary_check(const std::vector<double>& lambdas, double f2,
                                double f2_stderr);

}  // namespace llns::diffusivity
