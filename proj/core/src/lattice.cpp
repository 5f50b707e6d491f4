// Copyright 2026 The llns authors
// SPDX-License-Identifier: Apache-2.0
#include "llns/lattice.hpp"

#include <cstdlib>

#include "llns/error.hpp"

namespace llns {

WaveVector WaveVector::of(int dim, const std::array<int, 3>& comps) {
  WaveVector k;
  k.dim = dim;
  k.c = comps;
  return k;
}

int WaveVector::sup_norm() const {
  return std::max({std::abs(c[0]), std::abs(c[1]), std::abs(c[2])});
}

bool WaveVector::in_positive_half() const {
  for (int i = 0; i < dim; ++i) {
    if (c[std::size_t(i)] != 0) return c[std::size_t(i)] > 0;
  }
  return false;
}

std::string WaveVector::str() const {
  std::string s = "(";
  for (int i = 0; i < dim; ++i) {
    if (i) s += ",";
    s += std::to_string(c[std::size_t(i)]);
  }
  return s + ")";
}

std::uint64_t pack(const WaveVector& k) {
  std::uint64_t key = 0;
  for (int i = 0; i < 3; ++i) {
    const int v = k.c[std::size_t(i)];
    if (v <= -kPackBias || v >= kPackBias) {
      throw InvalidInput("wavevector component out of packing range: " +
                         k.str());
    }
    key = (key << kPackBits) | std::uint64_t(v + kPackBias);
  }
  return key;
}

WaveVector unpack(std::uint64_t key, int dim) {
  constexpr std::uint64_t mask = (std::uint64_t(1) << kPackBits) - 1;
  std::array<int, 3> c{};
  for (int i = 2; i >= 0; --i) {
    c[std::size_t(i)] = int(key & mask) - kPackBias;
    key >>= kPackBits;
  }
  return WaveVector::of(dim, c);
}

double dot(const Vec& a, const Vec& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

Vec cross(const Vec& a, const Vec& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
          a[0] * b[1] - a[1] * b[0]};
}

Vec matvec(const Mat& m, const Vec& v, int dim) {
  Vec out{0.0, 0.0, 0.0};
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) out[std::size_t(i)] += m[std::size_t(i)][std::size_t(j)] * v[std::size_t(j)];
  }
  return out;
}

}  // namespace llns
