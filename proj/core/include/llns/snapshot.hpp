// Copyright 2026 The llns authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>

#include "llns/chaos_kernel.hpp"

namespace llns::fock {

struct SnapshotMeta {
  double N = 0.0;
  double lambda = 0.0;
};

// CSV with a JSON header line. One row per stored coefficient:
// degree,d,tuple,re,im with tuple legs "x y z@l" joined by ';'.
void write_snapshot(std::ostream& os, const ChaosKernel& f, const SnapshotMeta& meta);

struct Snapshot {
  ChaosKernel kernel;
  SnapshotMeta meta;
};
Snapshot read_snapshot(std::istream& is);

}  // namespace llns::fock
