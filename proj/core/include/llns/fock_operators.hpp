// Copyright 2026 The llns authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

#include "llns/chaos_kernel.hpp"
#include "llns/model_params.hpp"

namespace llns::fock {

// Multiplies by ((2 pi)^2 sum |k_i|^2)^s.
ChaosKernel apply_L0_power(const ChaosKernel& f, double s);

// Multiplies by sum_j k_j^axis (axis zero-based).
ChaosKernel apply_momentum(int axis, const ChaosKernel& f);

// Raising part of the nonlinearity: degree n -> n+1.
ChaosKernel apply_Aplus(const ChaosKernel& f, const ModelParams& p);
// Lowering part: degree n -> n-1; degree 1 maps to the empty degree-1 kernel.
ChaosKernel apply_Aminus(const ChaosKernel& f, const ModelParams& p);

enum class Sign { plus, minus };
// (-L0)^{-1/2} A_sign (-L0)^{-1/2}.
ChaosKernel apply_T(Sign sign, const ChaosKernel& f, const ModelParams& p);

// Element of the truncated space: components of degree lo..hi.
class FockVector {
 public:
  FockVector(int dim, int lo, int hi);
  static FockVector single(const ChaosKernel& f, int lo, int hi);

  int dim() const { return dim_; }
  int lo() const { return lo_; }
  int hi() const { return hi_; }
  ChaosKernel& at(int degree);
  const ChaosKernel& at(int degree) const;

  std::size_t bytes() const;

 private:
  int dim_, lo_, hi_;
  std::vector<ChaosKernel> parts_;
};

FockVector combine(cplx a, const FockVector& x, cplx b, const FockVector& y);
cplx inner(const FockVector& f, const FockVector& g);
double norm2(const FockVector& f);
FockVector apply_L0_power(const FockVector& f, double s);

// Projected operators on degrees [lo, hi].
FockVector apply_A(const FockVector& f, const ModelParams& p);
FockVector apply_T(const FockVector& f, const ModelParams& p);
// Adjoint of apply_T: -T for the skew-Hermitian truncation.
FockVector apply_T_adjoint(const FockVector& f, const ModelParams& p);

struct SolverOptions {
  double tolerance = 1e-8;
  int max_iterations = 10000;
};

struct ResolventResult {
  FockVector solution;
  int iterations = 0;
  double residual = 0.0;  // ||-L v - rhs|| / ||rhs||
};

// Solves -(L0 + A_{lo,hi}) v = rhs on degrees [2, p.degree].
// Throws ConvergenceError with the residual when the budget runs out.
ResolventResult resolvent_solve(const FockVector& rhs, const ModelParams& p,
                                const SolverOptions& opts = {});

// Estimated bytes of one full degree-m fiber kernel.
double estimate_kernel_bytes(const ModelParams& p, int degree);

}  // namespace llns::fock
