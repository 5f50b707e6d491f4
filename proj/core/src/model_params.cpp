// Copyright 2026 The llns authors
// SPDX-License-Identifier: Apache-2.0
#include "llns/model_params.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include "llns/error.hpp"

namespace llns {

std::string to_string(MollifierNorm norm) {
  return norm == MollifierNorm::sup ? "sup" : "euclidean";
}

MollifierNorm parse_norm(const std::string& s) {
  if (s == "sup") return MollifierNorm::sup;
  if (s == "euclidean") return MollifierNorm::euclidean;
  throw InvalidInput("unknown mollifier norm '" + s + "' (sup|euclidean)");
}

double coupling_lambda_N(int dim, double lambda, double N) {
  if (dim == 2) return lambda / std::sqrt(std::log(N));
  return lambda * std::pow(N, 1.0 - dim / 2.0);
}

ModelParams ModelParams::make(int dim, double lambda, double N, int degree) {
  ModelParams p;
  p.dim = dim;
  p.lambda = lambda;
  p.N = N;
  p.degree = degree;
  p.norm = dim >= 3 ? MollifierNorm::sup : MollifierNorm::euclidean;
  p.validate();
  return p;
}

void ModelParams::validate() const {
  if (dim != 2 && dim != 3) {
    throw InvalidInput("d must be 2 or 3, got " + std::to_string(dim));
  }
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw InvalidInput("lambda must be finite and >= 0");
  }
  if (!std::isfinite(N) || N > 1e6) throw InvalidInput("N out of range");
  if (dim == 2) {
    if (N < 2.0 || N != std::floor(N)) {
      throw InvalidInput("d=2 needs an integer N >= 2, got " + std::to_string(N));
    }
  } else if (N < 0.5 || N - std::floor(N) != 0.5) {
    throw InvalidInput("d>=3 needs a half-integer N, got " + std::to_string(N));
  }
  if (degree < 1 || degree > 4) {
    throw InvalidInput("Fock truncation degree must lie in [1,4]");
  }
}

double ModelParams::mode_norm(const WaveVector& k) const {
  return norm == MollifierNorm::sup ? double(k.sup_norm()) : k.norm();
}

std::string ModelParams::describe() const {
  return "d=" + std::to_string(dim) + " lambda=" + std::to_string(lambda) +
         " N=" + std::to_string(N) + " n=" + std::to_string(degree) +
         " norm=" + to_string(norm);
}

std::shared_ptr<const std::vector<WaveVector>> ball_points(const ModelParams& p) {
  using Key = std::tuple<int, double, int>;
  static std::mutex mu;
  static std::map<Key, std::shared_ptr<const std::vector<WaveVector>>> cache;
  const Key key{p.dim, p.N, int(p.norm)};
  std::lock_guard<std::mutex> lock(mu);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  const int r = int(std::floor(p.N));
  auto pts = std::make_shared<std::vector<WaveVector>>();
  const int zr = p.dim == 3 ? r : 0;
  for (int x = -r; x <= r; ++x) {
    for (int y = -r; y <= r; ++y) {
      for (int z = -zr; z <= zr; ++z) {
        WaveVector k = WaveVector::of(p.dim, {x, y, z});
        if (!k.is_zero() && p.in_ball(k)) pts->push_back(k);
      }
    }
  }
  std::sort(pts->begin(), pts->end(),
            [](const WaveVector& a, const WaveVector& b) { return pack(a) < pack(b); });
  cache.emplace(key, pts);
  return pts;
}

}  // namespace llns
