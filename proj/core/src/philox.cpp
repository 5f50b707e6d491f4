// Copyright 2026 The llns authors
// SPDX-License-Identifier: Apache-2.0
#include "llns/philox.hpp"

#include "llns/lattice.hpp"

namespace llns::rng {
namespace {

constexpr std::uint32_t kW32A = 0x9E3779B9;
constexpr std::uint32_t kW32B = 0xBB67AE85;
constexpr std::uint32_t kM4x32A = 0xD2511F53;
constexpr std::uint32_t kM4x32B = 0xCD9E8D57;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo,
                    std::uint32_t& hi) {
  const std::uint64_t p = std::uint64_t(a) * std::uint64_t(b);
  lo = std::uint32_t(p);
  hi = std::uint32_t(p >> 32);
}

inline Counter round(const Counter& c, const Key& k) {
  std::uint32_t lo0, hi0, lo1, hi1;
  mulhilo(kM4x32A, c[0], lo0, hi0);
  mulhilo(kM4x32B, c[2], lo1, hi1);
  return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

inline double to_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits =
      ((std::uint64_t(hi) << 32) | std::uint64_t(lo)) >> 11;
  return (double(bits) + 1.0) * 0x1.0p-53;
}

}  // namespace

Counter philox4x32(Counter ctr, Key key) {
  for (int r = 0; r < 10; ++r) {
    if (r > 0) {
      key[0] += kW32A;
      key[1] += kW32B;
    }
    ctr = round(ctr, key);
  }
  return ctr;
}

std::array<double, 2> uniforms(const Counter& b) {
  return {to_unit(b[0], b[1]), to_unit(b[2], b[3])};
}

std::array<double, 2> normals(const Counter& b) {
  const auto u = uniforms(b);
  const double r = std::sqrt(-2.0 * std::log(u[0]));
  const double th = kTwoPi * u[1];
  return {r * std::cos(th), r * std::sin(th)};
}

Counter Stream::next_block() {
  const Counter ctr{std::uint32_t(index_), std::uint32_t(index_ >> 32),
                    std::uint32_t(stream_), std::uint32_t(stream_ >> 32)};
  ++index_;
  return philox4x32(ctr, key_);
}

std::uint32_t Stream::next_u32() {
  if (pos_ == 4) {
    buf_ = next_block();
    pos_ = 0;
  }
  return buf_[std::size_t(pos_++)];
}

double Stream::uniform() {
  const std::uint32_t hi = next_u32();
  const std::uint32_t lo = next_u32();
  return to_unit(hi, lo);
}

double Stream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u0 = uniform();
  const double u1 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u0));
  spare_ = r * std::sin(kTwoPi * u1);
  has_spare_ = true;
  return r * std::cos(kTwoPi * u1);
}

}  // namespace llns::rng
