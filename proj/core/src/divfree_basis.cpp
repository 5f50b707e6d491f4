// Copyright 2026 The llns authors
// SPDX-License-Identifier: Apache-2.0
#include "llns/divfree_basis.hpp"

#include <cstdlib>
#include <numeric>

#include "llns/error.hpp"

namespace llns::basis {
namespace {

void require_nonzero(const WaveVector& k) {
  if (k.is_zero()) throw InvalidInput("zero wavevector has no frame");
  if (k.dim != 2 && k.dim != 3) {
    throw InvalidInput("dimension must be 2 or 3, got " + std::to_string(k.dim));
  }
}

// Primitive direction in the positive half: gcd-reduced and sign-fixed,
// so every k on the same line through 0 maps to the same representative.
WaveVector primitive_positive(const WaveVector& k) {
  int g = 0;
  for (int v : k.c) g = std::gcd(g, std::abs(v));
  WaveVector r = WaveVector::of(k.dim, {k.c[0] / g, k.c[1] / g, k.c[2] / g});
  return r.in_positive_half() ? r : -r;
}

Vec unit(const WaveVector& k) {
  Vec v = k.as_real();
  const double n = k.norm();
  for (auto& x : v) x /= n;
  return v;
}

}  // namespace

Mat leray_matrix(const WaveVector& k) {
  require_nonzero(k);
  const double n2 = double(k.norm2());
  Mat m{};
  for (int i = 0; i < k.dim; ++i) {
    for (int j = 0; j < k.dim; ++j) {
      m[std::size_t(i)][std::size_t(j)] =
          (i == j ? 1.0 : 0.0) - double(k[i]) * double(k[j]) / n2;
    }
  }
  return m;
}

Frame frame(const WaveVector& k, FrameRule rule) {
  require_nonzero(k);
  const WaveVector p = primitive_positive(k);
  const Vec h = unit(p);
  Frame f;
  f.k = k;
  f.count = k.dim - 1;
  if (k.dim == 2) {
    // det[a, h] = h_y^2 + h_x^2 = +1
    f.a[0] = {h[1], -h[0], 0.0};
    return f;
  }
  // d = 3: Gram-Schmidt of the first (or last) canonical axis not parallel to k.
  std::array<int, 3> order = rule == FrameRule::first_axis
                                 ? std::array<int, 3>{0, 1, 2}
                                 : std::array<int, 3>{2, 1, 0};
  for (int axis : order) {
    Vec e{0.0, 0.0, 0.0};
    e[std::size_t(axis)] = 1.0;
    const Vec par = cross(h, e);
    if (dot(par, par) < 1e-24) continue;
    const double proj = h[std::size_t(axis)];
    Vec a{e[0] - proj * h[0], e[1] - proj * h[1], e[2] - proj * h[2]};
    const double n = std::sqrt(dot(a, a));
    for (auto& x : a) x /= n;
    f.a[0] = a;
    f.a[1] = cross(h, a);
    return f;
  }
  throw ComputationError("no admissible axis for frame of " + k.str());
}

FrameCoefficients decompose(const FourierField& field, FrameRule rule) {
  FrameCoefficients out;
  out.reserve(field.size());
  for (const auto& e : field) {
    const Frame f = frame(e.k, rule);
    const Vec kv = e.k.as_real();
    cplx div = 0.0;
    double mag = 0.0;
    for (int l = 0; l < e.k.dim; ++l) {
      div += kv[std::size_t(l)] * e.u[std::size_t(l)];
      mag += std::norm(e.u[std::size_t(l)]);
    }
    if (std::abs(div) > kDivergenceTolerance * e.k.norm() * std::sqrt(mag)) {
      throw InvalidInput("field is not divergence-free at k=" + e.k.str());
    }
    ModeEntry m;
    m.k = e.k;
    for (int alpha = 0; alpha < f.count; ++alpha) {
      for (int l = 0; l < e.k.dim; ++l) {
        m.u[std::size_t(alpha)] += f[alpha][std::size_t(l)] * e.u[std::size_t(l)];
      }
    }
    out.push_back(m);
  }
  return out;
}

FourierField recompose(const FrameCoefficients& coeffs, FrameRule rule) {
  FourierField out;
  out.reserve(coeffs.size());
  for (const auto& m : coeffs) {
    const Frame f = frame(m.k, rule);
    FieldEntry e;
    e.k = m.k;
    for (int alpha = 0; alpha < f.count; ++alpha) {
      for (int l = 0; l < m.k.dim; ++l) {
        e.u[std::size_t(l)] += m.u[std::size_t(alpha)] * f[alpha][std::size_t(l)];
      }
    }
    out.push_back(e);
  }
  return out;
}

}  // namespace llns::basis
