// Copyright 2026 The llns authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "llns/lattice.hpp"

namespace llns::basis {

// How a_{k,1} is picked in d=3. Both give valid even, ray-constant,
// right-handed frames; results that are frame-free must not see the choice.
enum class FrameRule { first_axis, last_axis };

struct Frame {
  WaveVector k;
  int count = 2;            // d - 1
  std::array<Vec, 2> a{};   // a_{k,1}, a_{k,2}
  const Vec& operator[](int alpha) const { return a[std::size_t(alpha)]; }
};

Mat leray_matrix(const WaveVector& k);

Frame frame(const WaveVector& k, FrameRule rule = FrameRule::first_axis);

using CVec = std::array<cplx, 3>;

struct FieldEntry {
  WaveVector k;
  CVec u{};
};
using FourierField = std::vector<FieldEntry>;

struct ModeEntry {
  WaveVector k;
  std::array<cplx, 2> u{};
};
using FrameCoefficients = std::vector<ModeEntry>;

inline constexpr double kDivergenceTolerance = 1e-10;

// Throws InvalidInput naming the first k whose |k . u| exceeds the
// tolerance relative to |k||u|.
FrameCoefficients decompose(const FourierField& field,
                            FrameRule rule = FrameRule::first_axis);
FourierField recompose(const FrameCoefficients& coeffs,
                       FrameRule rule = FrameRule::first_axis);

}  // namespace llns::basis
