// Copyright 2026 The llns authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <utility>
#include <vector>

#include "llns/chaos_kernel.hpp"
#include "llns/philox.hpp"
#include "oracle/fock_oracle.hpp"

namespace oracle {

struct Term {
  cplx w;
  std::vector<std::pair<WaveVector, int>> legs;  // (k, alpha)
};

inline llns::fock::ChaosKernel library_kernel(int d, int n, const std::vector<Term>& terms) {
  llns::fock::ChaosKernel acc(d, n);
  for (const auto& s : terms) {
    std::vector<llns::fock::ChaosKernel> f;
    for (const auto& [k, a] : s.legs) f.push_back(llns::fock::sigma_kernel(k, a));
    acc = llns::fock::combine(1.0, acc, s.w, llns::fock::symmetrized_product(f));
  }
  return acc;
}

inline ProductSum oracle_kernel(const std::vector<Term>& terms) {
  ProductSum ps;
  for (const auto& s : terms) {
    std::vector<Leg> legs;
    for (const auto& [k, a] : s.legs) legs.push_back(sigma_leg(k, a));
    ps.terms.emplace_back(s.w, legs);
  }
  return ps;
}

// Random product terms of degree n on the fiber K with legs from points.
inline std::vector<Term> random_terms(int n, const WaveVector& K, const std::vector<WaveVector>& points,
                                      int terms, std::uint64_t seed) {
  llns::rng::Stream s(seed, 77);
  std::vector<Term> out;
  const int d = K.dim;
  for (int attempt = 0; int(out.size()) < terms && attempt < 10000; ++attempt) {
    Term sp{cplx(s.normal(), s.normal()), {}};
    WaveVector rest = K;
    for (int j = 0; j + 1 < n; ++j) {
      const auto& p = points[s.next_u32() % points.size()];
      sp.legs.emplace_back(p, 1 + int(s.next_u32() % std::uint32_t(d - 1)));
      rest = rest - p;
    }
    if (rest.is_zero() || std::find(points.begin(), points.end(), rest) == points.end()) continue;
    sp.legs.emplace_back(rest, 1 + int(s.next_u32() % std::uint32_t(d - 1)));
    out.push_back(sp);
  }
  return out;
}

// Library coefficient at an ordered tuple.
inline cplx lib_at(const llns::fock::ChaosKernel& f, const std::vector<WaveVector>& k,
                   const std::vector<int>& l) {
  return f.at(l, k);
}

}  // namespace oracle
