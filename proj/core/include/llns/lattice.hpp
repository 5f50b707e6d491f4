// Copyright 2026 The llns authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace llns {

using cplx = std::complex<double>;
using Vec = std::array<double, 3>;
using Mat = std::array<std::array<double, 3>, 3>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Integer lattice point in dimension 2 or 3. Unused trailing components are 0.
struct WaveVector {
  int dim = 3;
  std::array<int, 3> c{0, 0, 0};

  WaveVector() = default;
  WaveVector(int x, int y) : dim(2), c{x, y, 0} {}
  WaveVector(int x, int y, int z) : dim(3), c{x, y, z} {}
  static WaveVector of(int dim, const std::array<int, 3>& comps);

  int operator[](int i) const { return c[static_cast<std::size_t>(i)]; }
  bool is_zero() const { return c[0] == 0 && c[1] == 0 && c[2] == 0; }
  long norm2() const {
    return long(c[0]) * c[0] + long(c[1]) * c[1] + long(c[2]) * c[2];
  }
  double norm() const { return std::sqrt(double(norm2())); }
  int sup_norm() const;
  // First nonzero component positive.
  bool in_positive_half() const;
  Vec as_real() const { return {double(c[0]), double(c[1]), double(c[2])}; }
  std::string str() const;

  friend WaveVector operator+(const WaveVector& a, const WaveVector& b) {
    return of(a.dim, {a.c[0] + b.c[0], a.c[1] + b.c[1], a.c[2] + b.c[2]});
  }
  friend WaveVector operator-(const WaveVector& a, const WaveVector& b) {
    return of(a.dim, {a.c[0] - b.c[0], a.c[1] - b.c[1], a.c[2] - b.c[2]});
  }
  friend WaveVector operator-(const WaveVector& a) {
    return of(a.dim, {-a.c[0], -a.c[1], -a.c[2]});
  }
  friend bool operator==(const WaveVector& a, const WaveVector& b) {
    return a.dim == b.dim && a.c == b.c;
  }
  friend bool operator<(const WaveVector& a, const WaveVector& b) {
    return a.c < b.c;
  }
};

// Order-preserving 64-bit packing, 21 bits per component.
inline constexpr int kPackBits = 21;
inline constexpr int kPackBias = 1 << (kPackBits - 1);
std::uint64_t pack(const WaveVector& k);
WaveVector unpack(std::uint64_t key, int dim);

double dot(const Vec& a, const Vec& b);
Vec cross(const Vec& a, const Vec& b);
Vec matvec(const Mat& m, const Vec& v, int dim);

}  // namespace llns
