// Copyright 2026 The llns authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "llns/divfree_basis.hpp"
#include "llns/lattice.hpp"

namespace llns::fock {

// Degree 4 is the largest truncation; A+ on it produces degree 5.
inline constexpr int kMaxLegs = 5;

// Sorted packed wavevectors, unused slots zero.
using TupleKey = std::array<std::uint64_t, kMaxLegs>;

struct TupleKeyHash {
  std::size_t operator()(const TupleKey& k) const noexcept {
    std::uint64_t h = 0x9E3779B97F4A7C15ull;
    for (std::uint64_t v : k) {
      h ^= v + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
      h *= 0xBF58476D1CE4E5B9ull;
    }
    return std::size_t(h ^ (h >> 31));
  }
};

// Symmetric degree-n coefficient table. Each canonical key (sorted multiset
// of wavevectors) owns a dense block of d^n values over (l_1..l_n) listed in
// key order, row-major with l_1 slowest. Symmetry under permutations of
// equal wavevectors is a property of the values, not of the storage.
class ChaosKernel {
 public:
  ChaosKernel(int dim, int degree);

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  std::size_t block_size() const { return block_; }
  std::size_t size() const { return keys_.size(); }
  bool empty() const { return keys_.empty(); }

  const TupleKey& key(std::size_t i) const { return keys_[i]; }
  WaveVector leg(std::size_t i, int j) const;
  std::vector<WaveVector> legs(std::size_t i) const;
  std::span<const cplx> block(std::size_t i) const {
    return {values_.data() + i * block_, block_};
  }
  std::span<cplx> block(std::size_t i) {
    return {values_.data() + i * block_, block_};
  }
  const std::vector<cplx>& values() const { return values_; }
  std::vector<cplx>& values() { return values_; }

  // Number of distinct orderings of the multiset at key i: n!/prod m!.
  double orderings(std::size_t i) const;

  std::optional<std::size_t> find(const TupleKey& key) const;
  // Coefficient at an arbitrary (unsorted) tuple, l zero-based.
  cplx at(std::span<const int> l, std::span<const WaveVector> k) const;

  const std::optional<WaveVector>& momentum() const { return momentum_; }
  // Throws InvalidInput when a stored tuple has a different sum.
  void declare_momentum(const WaveVector& K);

  std::size_t bytes() const {
    return keys_.size() * sizeof(TupleKey) + values_.size() * sizeof(cplx);
  }

 private:
  friend class KernelBuilder;
  friend ChaosKernel combine(cplx, const ChaosKernel&, cplx, const ChaosKernel&);

  int dim_;
  int degree_;
  std::size_t block_;
  std::vector<TupleKey> keys_;
  std::vector<cplx> values_;
  std::optional<WaveVector> momentum_;
};

// Accumulates blocks by key, then sorts into a ChaosKernel.
// Spans returned by block() are invalidated by the next block() call.
class KernelBuilder {
 public:
  KernelBuilder(int dim, int degree);
  std::span<cplx> block(const TupleKey& key);
  void reserve(std::size_t n);
  void set_momentum(std::optional<WaveVector> K) { momentum_ = K; }
  ChaosKernel finish() &&;

 private:
  int dim_;
  int degree_;
  std::size_t block_;
  std::unordered_map<TupleKey, std::size_t, TupleKeyHash> index_;
  std::vector<TupleKey> keys_;
  std::vector<cplx> values_;
  std::optional<WaveVector> momentum_;
};

TupleKey make_key(std::span<const WaveVector> legs);
std::size_t ipow(std::size_t base, int exp);
double factorial(int n);

// a*x + b*y on the union of supports.
ChaosKernel combine(cplx a, const ChaosKernel& x, cplx b, const ChaosKernel& y);
inline ChaosKernel operator+(const ChaosKernel& x, const ChaosKernel& y) {
  return combine(1.0, x, 1.0, y);
}
inline ChaosKernel operator-(const ChaosKernel& x, const ChaosKernel& y) {
  return combine(1.0, x, -1.0, y);
}
ChaosKernel scaled(const ChaosKernel& x, cplx a);

// Fock inner product n! sum over all tuples of conj(f) g. Different
// degrees give 0.
cplx inner(const ChaosKernel& f, const ChaosKernel& g);
double norm2(const ChaosKernel& f);
double max_abs(const ChaosKernel& f);

// sigma_{k,alpha}, alpha in 1..d-1.
ChaosKernel sigma_kernel(const WaveVector& k, int alpha,
                         basis::FrameRule rule = basis::FrameRule::first_axis);

// Symmetrised tensor product of degree-1 kernels.
ChaosKernel symmetrized_product(std::span<const ChaosKernel> factors);
ChaosKernel sym_pair(const ChaosKernel& f, const ChaosKernel& g);

// Largest deviation from symmetry under swapping equal wavevectors.
double symmetry_defect(const ChaosKernel& f);
// Largest |sum_l k_j^l f(.., (l at slot j), ..)| over all slots and tuples.
double divergence_defect(const ChaosKernel& f);

// Random symmetric, per-leg divergence-free kernel on the fiber sum k = K:
// a sum of `terms` symmetrised products of sigma's with legs drawn from the
// given point set, complex Gaussian weights.
ChaosKernel random_kernel(int degree, const WaveVector& K,
                          const std::vector<WaveVector>& points, int terms,
                          std::uint64_t seed);

}  // namespace llns::fock
