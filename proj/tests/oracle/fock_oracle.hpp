// Copyright 2026 The llns authors
// SPDX-License-Identifier: Apache-2.0
//
// Direct evaluation of kernels and of the raising/lowering operators on full
// ordered tuples, written against the displayed operator formulas and kept
// free of the library's storage and scatter code.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numeric>
#include <vector>

#include "llns/divfree_basis.hpp"
#include "llns/model_params.hpp"

namespace oracle {

using llns::cplx;
using llns::WaveVector;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// value(k_1..k_n, l_1..l_n), components l zero-based
using Function = std::function<cplx(const std::vector<WaveVector>&, const std::vector<int>&)>;

struct Leg {
  WaveVector k;
  std::array<double, 3> a;
};

// sum_terms w * (1/n!) sum_perm prod_i [k_i = leg_{perm i}] a_{perm i}(l_i)
struct ProductSum {
  std::vector<std::pair<cplx, std::vector<Leg>>> terms;

  cplx operator()(const std::vector<WaveVector>& k, const std::vector<int>& l) const {
    cplx total = 0.0;
    for (const auto& [w, legs] : terms) {
      if (legs.size() != k.size()) continue;
      std::vector<int> perm(legs.size());
      std::iota(perm.begin(), perm.end(), 0);
      double fact = 1.0, s = 0.0;
      for (std::size_t i = 2; i <= legs.size(); ++i) fact *= double(i);
      do {
        double v = 1.0;
        for (std::size_t i = 0; i < k.size() && v != 0.0; ++i) {
          const auto& leg = legs[std::size_t(perm[i])];
          v = leg.k == k[i] ? v * leg.a[std::size_t(l[i])] : 0.0;
        }
        s += v;
      } while (std::next_permutation(perm.begin(), perm.end()));
      total += w * s / fact;
    }
    return total;
  }
};

inline Leg sigma_leg(const WaveVector& k, int alpha) {
  const auto f = llns::basis::frame(k);
  return {k, f[alpha - 1]};
}

// I - k k^T / |k|^2, computed here rather than taken from the library.
inline double leray(const WaveVector& k, int i, int j) {
  const double n2 = double(k.norm2());
  return (i == j ? 1.0 : 0.0) - double(k[i]) * double(k[j]) / n2;
}

inline bool in_ball(const llns::ModelParams& p, const WaveVector& k) {
  if (p.norm == llns::MollifierNorm::sup) {
    int m = 0;
    for (int i = 0; i < k.dim; ++i) m = std::max(m, std::abs(k[i]));
    return m <= p.N;
  }
  return std::sqrt(double(k.norm2())) <= p.N;
}

inline bool mollifier(const llns::ModelParams& p, const WaveVector& a, const WaveVector& b) {
  return in_ball(p, a) && in_ball(p, b) && in_ball(p, a + b);
}

inline std::vector<WaveVector> ball(const llns::ModelParams& p) {
  std::vector<WaveVector> out;
  const int r = int(std::floor(p.N));
  for (int x = -r; x <= r; ++x) {
    for (int y = -r; y <= r; ++y) {
      for (int z = (p.dim == 3 ? -r : 0); z <= (p.dim == 3 ? r : 0); ++z) {
        const auto k = p.dim == 3 ? WaveVector(x, y, z) : WaveVector(x, y);
        if (!k.is_zero() && in_ball(p, k)) out.push_back(k);
      }
    }
  }
  return out;
}

// Raising operator at one ordered output tuple of length n+1.
inline cplx aplus_at(const Function& phi, int n, const llns::ModelParams& p,
                     const std::vector<WaveVector>& k, const std::vector<int>& l) {
  const int d = p.dim;
  const cplx pref = p.lambda_N() * kTwoPi * cplx(0.0, 1.0) / double(n + 1);
  cplx total = 0.0;
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) {
      if (i == j) continue;
      const WaveVector& ki = k[std::size_t(i)];
      const WaveVector& kj = k[std::size_t(j)];
      if (!mollifier(p, ki, kj)) continue;
      const WaveVector s = ki + kj;
      if (s.is_zero()) continue;
      double first = 0.0;
      for (int m = 0; m < d; ++m) first += leray(ki, l[std::size_t(i)], m) * double(s[m]);
      std::vector<WaveVector> kk{s};
      std::vector<int> ll{0};
      for (int r = 0; r <= n; ++r) {
        if (r != i && r != j) {
          kk.push_back(k[std::size_t(r)]);
          ll.push_back(l[std::size_t(r)]);
        }
      }
      cplx second = 0.0;
      for (int t = 0; t < d; ++t) {
        ll[0] = t;
        second += leray(kj, l[std::size_t(j)], t) * phi(kk, ll);
      }
      total += first * second;
    }
  }
  return pref * total;
}

// Lowering operator at one ordered output tuple of length n-1.
inline cplx aminus_at(const Function& phi, int n, const llns::ModelParams& p,
                      const std::vector<WaveVector>& k, const std::vector<int>& l,
                      const std::vector<WaveVector>& points) {
  const int d = p.dim;
  const cplx pref = p.lambda_N() * kTwoPi * cplx(0.0, 1.0) * double(n);
  cplx total = 0.0;
  for (int j = 0; j < n - 1; ++j) {
    const WaveVector& kj = k[std::size_t(j)];
    std::vector<WaveVector> kk{kj, kj};
    std::vector<int> ll{0, 0};
    for (int r = 0; r < n - 1; ++r) {
      if (r != j) {
        kk.push_back(k[std::size_t(r)]);
        ll.push_back(l[std::size_t(r)]);
      }
    }
    for (const auto& pp : points) {
      const WaveVector q = kj - pp;
      if (q.is_zero() || !mollifier(p, pp, q)) continue;
      kk[0] = pp;
      kk[1] = q;
      for (int i = 0; i < d; ++i) {
        for (int t = 0; t < d; ++t) {
          const double c = double(kj[i]) * leray(kj, l[std::size_t(j)], t);
          if (c == 0.0) continue;
          ll[0] = t;
          ll[1] = i;
          total += c * phi(kk, ll);
        }
      }
    }
  }
  return pref * total;
}

// All ordered n-tuples from points with sum K.
inline std::vector<std::vector<WaveVector>> ordered_tuples(const std::vector<WaveVector>& points,
                                                           const WaveVector& K, int n) {
  std::vector<std::vector<WaveVector>> out;
  std::vector<WaveVector> cur;
  std::function<void(WaveVector)> rec = [&](WaveVector rest) {
    if (int(cur.size()) == n - 1) {
      if (std::find(points.begin(), points.end(), rest) != points.end()) {
        cur.push_back(rest);
        out.push_back(cur);
        cur.pop_back();
      }
      return;
    }
    for (const auto& p : points) {
      cur.push_back(p);
      rec(rest - p);
      cur.pop_back();
    }
  };
  rec(K);
  return out;
}

// All component assignments l in {0..d-1}^n.
inline std::vector<std::vector<int>> components(int d, int n) {
  std::vector<std::vector<int>> out;
  std::vector<int> l(std::size_t(n), 0);
  for (;;) {
    out.push_back(l);
    int i = n - 1;
    while (i >= 0 && ++l[std::size_t(i)] == d) l[std::size_t(i--)] = 0;
    if (i < 0) break;
  }
  return out;
}

// n! sum over ordered tuples of conj(f) g.
inline cplx brute_inner(const Function& f, const Function& g, int n, int d,
                        const std::vector<std::vector<WaveVector>>& tuples) {
  double fact = 1.0;
  for (int i = 2; i <= n; ++i) fact *= i;
  cplx s = 0.0;
  const auto ls = components(d, n);
  for (const auto& k : tuples) {
    for (const auto& l : ls) s += std::conj(f(k, l)) * g(k, l);
  }
  return fact * s;
}

}  // namespace oracle
