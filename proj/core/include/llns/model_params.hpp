// Copyright 2026 The llns authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <string>
#include <vector>

#include "llns/lattice.hpp"

namespace llns {

enum class MollifierNorm { euclidean, sup };

std::string to_string(MollifierNorm norm);
MollifierNorm parse_norm(const std::string& s);

// lambda_N = lambda / sqrt(log N) for d=2, lambda N^{1-d/2} for d>=3.
double coupling_lambda_N(int dim, double lambda, double N);

struct ModelParams {
  int dim = 3;
  double lambda = 1.0;
  double N = 4.5;
  int degree = 2;  // Fock truncation n
  MollifierNorm norm = MollifierNorm::sup;

  // Default norm for the dimension: sup for d>=3, Euclidean for d=2.
  static ModelParams make(int dim, double lambda, double N, int degree = 2);
  ModelParams with_norm(MollifierNorm n) const {
    ModelParams p = *this;
    p.norm = n;
    return p;
  }
  ModelParams with_lambda(double l) const {
    ModelParams p = *this;
    p.lambda = l;
    return p;
  }
  ModelParams with_N(double n) const {
    ModelParams p = *this;
    p.N = n;
    return p;
  }

  // Throws InvalidInput. Half-integer N for d>=3, integer N>=2 for d=2.
  void validate() const;

  double lambda_N() const { return coupling_lambda_N(dim, lambda, N); }
  double mode_norm(const WaveVector& k) const;
  bool in_ball(const WaveVector& k) const { return mode_norm(k) <= N; }
  bool mollifier(const WaveVector& p, const WaveVector& q) const {
    return in_ball(p) && in_ball(q) && in_ball(p + q);
  }
  std::string describe() const;
};

// Nonzero lattice points with ||k|| <= N, sorted by packed key. Cached.
std::shared_ptr<const std::vector<WaveVector>> ball_points(const ModelParams& p);

}  // namespace llns
