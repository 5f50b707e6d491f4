// Copyright 2026 The llns authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace llns::rng {

using Counter = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

// Philox4x32 with 10 rounds.
Counter philox4x32(Counter ctr, Key key);

// Two 53-bit uniforms in (0, 1] from one block.
std::array<double, 2> uniforms(const Counter& block);

// Two independent standard normals (Box-Muller) from one block.
std::array<double, 2> normals(const Counter& block);

inline Key key_from_seed(std::uint64_t seed) {
  return {std::uint32_t(seed), std::uint32_t(seed >> 32)};
}

// Sequential stream: counter = (index lo, index hi, stream lo, stream hi).
// Streams with distinct ids under one seed never overlap.
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t stream_id)
      : key_(key_from_seed(seed)), stream_(stream_id) {}

  std::uint32_t next_u32();
  double uniform();          // (0, 1]
  double normal();
  std::uint64_t blocks_used() const { return index_; }

 private:
  Counter next_block();

  Key key_;
  std::uint64_t stream_;
  std::uint64_t index_ = 0;
  Counter buf_{};
  int pos_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace llns::rng
