// Copyright 2026 The llns authors
// SPDX-License-Identifier: Apache-2.0
#include "llns/chaos_kernel.hpp"

#include <algorithm>
#include <numeric>

#include "llns/error.hpp"
#include "llns/philox.hpp"

namespace llns::fock {

std::size_t ipow(std::size_t base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

TupleKey make_key(std::span<const WaveVector> legs) {
  TupleKey key{};
  for (std::size_t i = 0; i < legs.size(); ++i) key[i] = pack(legs[i]);
  std::sort(key.begin(), key.begin() + std::ptrdiff_t(legs.size()));
  return key;
}

ChaosKernel::ChaosKernel(int dim, int degree)
    : dim_(dim), degree_(degree), block_(ipow(std::size_t(dim), degree)) {
  if (dim != 2 && dim != 3) throw InvalidInput("kernel dimension must be 2 or 3");
  if (degree < 1 || degree > kMaxLegs) {
    throw InvalidInput("kernel degree out of range: " + std::to_string(degree));
  }
}

WaveVector ChaosKernel::leg(std::size_t i, int j) const {
  return unpack(keys_[i][std::size_t(j)], dim_);
}

std::vector<WaveVector> ChaosKernel::legs(std::size_t i) const {
  std::vector<WaveVector> out;
  out.reserve(std::size_t(degree_));
  for (int j = 0; j < degree_; ++j) out.push_back(leg(i, j));
  return out;
}

double ChaosKernel::orderings(std::size_t i) const {
  const auto& k = keys_[i];
  double denom = 1.0;
  int run = 1;
  for (int j = 1; j <= degree_; ++j) {
    if (j < degree_ && k[std::size_t(j)] == k[std::size_t(j - 1)]) {
      ++run;
    } else {
      denom *= factorial(run);
      run = 1;
    }
  }
  return factorial(degree_) / denom;
}

std::optional<std::size_t> ChaosKernel::find(const TupleKey& key) const {
  auto it = std::lower_bound(keys_.begin(), keys_.end(), key);
  if (it == keys_.end() || *it != key) return std::nullopt;
  return std::size_t(it - keys_.begin());
}

cplx ChaosKernel::at(std::span<const int> l, std::span<const WaveVector> k) const {
  if (int(l.size()) != degree_ || int(k.size()) != degree_) {
    throw InvalidInput("tuple length does not match kernel degree");
  }
  std::vector<int> order(static_cast<std::size_t>(degree_));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return pack(k[std::size_t(a)]) < pack(k[std::size_t(b)]);
  });
  TupleKey key{};
  std::size_t idx = 0;
  for (int j = 0; j < degree_; ++j) {
    key[std::size_t(j)] = pack(k[std::size_t(order[std::size_t(j)])]);
    idx = idx * std::size_t(dim_) + std::size_t(l[std::size_t(order[std::size_t(j)])]);
  }
  const auto pos = find(key);
  if (!pos) return 0.0;
  return values_[*pos * block_ + idx];
}

void ChaosKernel::declare_momentum(const WaveVector& K) {
  for (std::size_t i = 0; i < keys_.size(); ++i) {
    WaveVector s = WaveVector::of(dim_, {0, 0, 0});
    for (int j = 0; j < degree_; ++j) s = s + leg(i, j);
    if (!(s == K)) {
      throw InvalidInput("tuple with momentum " + s.str() +
                         " outside declared fiber " + K.str());
    }
  }
  momentum_ = K;
}

KernelBuilder::KernelBuilder(int dim, int degree)
    : dim_(dim), degree_(degree), block_(ipow(std::size_t(dim), degree)) {}

void KernelBuilder::reserve(std::size_t n) {
  index_.reserve(n);
  keys_.reserve(n);
  values_.reserve(n * block_);
}

std::span<cplx> KernelBuilder::block(const TupleKey& key) {
  auto [it, inserted] = index_.try_emplace(key, keys_.size());
  if (inserted) {
    keys_.push_back(key);
    values_.resize(values_.size() + block_, cplx(0.0));
  }
  return {values_.data() + it->second * block_, block_};
}

ChaosKernel KernelBuilder::finish() && {
  ChaosKernel out(dim_, degree_);
  std::vector<std::size_t> order(keys_.size());
  std::iota(order.begin(), order.end(), std::size_t(0));
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return keys_[a] < keys_[b]; });
  index_.clear();
  out.keys_.reserve(keys_.size());
  out.values_.reserve(values_.size());
  for (std::size_t i : order) {
    out.keys_.push_back(keys_[i]);
    const auto first = values_.begin() + std::ptrdiff_t(i * block_);
    out.values_.insert(out.values_.end(), first, first + std::ptrdiff_t(block_));
  }
  keys_.clear();
  values_.clear();
  values_.shrink_to_fit();
  out.momentum_ = momentum_;
  return out;
}

ChaosKernel combine(cplx a, const ChaosKernel& x, cplx b, const ChaosKernel& y) {
  if (x.dim_ != y.dim_ || x.degree_ != y.degree_) {
    throw InvalidInput("cannot combine kernels of different shape");
  }
  ChaosKernel out(x.dim_, x.degree_);
  const std::size_t bs = x.block_;
  out.keys_.reserve(std::max(x.keys_.size(), y.keys_.size()));
  out.values_.reserve(out.keys_.capacity() * bs);
  std::size_t i = 0, j = 0;
  while (i < x.keys_.size() || j < y.keys_.size()) {
    const bool take_x = j == y.keys_.size() ||
                        (i < x.keys_.size() && x.keys_[i] <= y.keys_[j]);
    const bool take_y = i == x.keys_.size() ||
                        (j < y.keys_.size() && y.keys_[j] <= x.keys_[i]);
    out.keys_.push_back(take_x ? x.keys_[i] : y.keys_[j]);
    const std::size_t base = out.values_.size();
    out.values_.resize(base + bs, cplx(0.0));
    if (take_x) {
      for (std::size_t t = 0; t < bs; ++t) out.values_[base + t] += a * x.values_[i * bs + t];
      ++i;
    }
    if (take_y) {
      for (std::size_t t = 0; t < bs; ++t) out.values_[base + t] += b * y.values_[j * bs + t];
      ++j;
    }
  }
  if (x.momentum_ && y.momentum_ && *x.momentum_ == *y.momentum_) {
    out.momentum_ = x.momentum_;
  } else if (x.keys_.empty()) {
    out.momentum_ = y.momentum_;
  } else if (y.keys_.empty()) {
    out.momentum_ = x.momentum_;
  }
  return out;
}

ChaosKernel scaled(const ChaosKernel& x, cplx a) {
  ChaosKernel out = x;
  for (auto& v : out.values()) v *= a;
  return out;
}

cplx inner(const ChaosKernel& f, const ChaosKernel& g) {
  if (f.degree() != g.degree() || f.dim() != g.dim()) return 0.0;
  const std::size_t bs = f.block_size();
  cplx total = 0.0;
  std::size_t i = 0, j = 0;
  while (i < f.size() && j < g.size()) {
    if (f.key(i) < g.key(j)) {
      ++i;
    } else if (g.key(j) < f.key(i)) {
      ++j;
    } else {
      cplx s = 0.0;
      const auto a = f.block(i);
      const auto b = g.block(j);
      for (std::size_t t = 0; t < bs; ++t) s += std::conj(a[t]) * b[t];
      total += f.orderings(i) * s;
      ++i;
      ++j;
    }
  }
  return factorial(f.degree()) * total;
}

double norm2(const ChaosKernel& f) { return inner(f, f).real(); }

double max_abs(const ChaosKernel& f) {
  double m = 0.0;
  for (const auto& v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

ChaosKernel sigma_kernel(const WaveVector& k, int alpha, basis::FrameRule rule) {
  if (alpha < 1 || alpha > k.dim - 1) {
    throw InvalidInput("frame index must lie in 1..d-1, got " + std::to_string(alpha));
  }
  const basis::Frame fr = basis::frame(k, rule);
  KernelBuilder b(k.dim, 1);
  const WaveVector legs[1] = {k};
  auto blk = b.block(make_key(legs));
  for (int l = 0; l < k.dim; ++l) blk[std::size_t(l)] = fr[alpha - 1][std::size_t(l)];
  b.set_momentum(k);
  return std::move(b).finish();
}

ChaosKernel symmetrized_product(std::span<const ChaosKernel> factors) {
  const int n = int(factors.size());
  if (n < 1 || n > kMaxLegs) throw InvalidInput("bad number of factors");
  const int d = factors[0].dim();
  for (const auto& f : factors) {
    if (f.degree() != 1 || f.dim() != d) {
      throw InvalidInput("symmetrized_product takes degree-1 kernels of one dimension");
    }
  }
  KernelBuilder b(d, n);
  const double weight = 1.0 / factorial(n);
  std::vector<std::size_t> pick(std::size_t(n), 0);
  std::vector<int> perm(static_cast<std::size_t>(n));
  const std::size_t bs = ipow(std::size_t(d), n);
  while (true) {
    std::vector<WaveVector> ks;
    for (int i = 0; i < n; ++i) ks.push_back(factors[std::size_t(i)].leg(pick[std::size_t(i)], 0));
    const TupleKey key = make_key(ks);
    std::vector<WaveVector> sorted_k;
    for (int j = 0; j < n; ++j) sorted_k.push_back(unpack(key[std::size_t(j)], d));
    std::vector<cplx> acc(bs, cplx(0.0));
    // perm[j] = factor placed at sorted slot j
    std::iota(perm.begin(), perm.end(), 0);
    do {
      bool ok = true;
      for (int j = 0; j < n && ok; ++j) ok = ks[std::size_t(perm[std::size_t(j)])] == sorted_k[std::size_t(j)];
      if (!ok) continue;
      for (std::size_t idx = 0; idx < bs; ++idx) {
        std::size_t rem = idx;
        cplx v = weight;
        for (int j = n - 1; j >= 0; --j) {
          const std::size_t l = rem % std::size_t(d);
          rem /= std::size_t(d);
          const int fi = perm[std::size_t(j)];
          v *= factors[std::size_t(fi)].block(pick[std::size_t(fi)])[l];
        }
        acc[idx] += v;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    auto blk = b.block(key);
    for (std::size_t t = 0; t < bs; ++t) blk[t] += acc[t];

    int i = 0;
    for (; i < n; ++i) {
      if (++pick[std::size_t(i)] < factors[std::size_t(i)].size()) break;
      pick[std::size_t(i)] = 0;
    }
    if (i == n) break;
  }
  bool same_momentum = true;
  WaveVector K = WaveVector::of(d, {0, 0, 0});
  for (const auto& f : factors) {
    if (!f.momentum()) {
      same_momentum = false;
      break;
    }
    K = K + *f.momentum();
  }
  if (same_momentum) b.set_momentum(K);
  return std::move(b).finish();
}

ChaosKernel sym_pair(const ChaosKernel& f, const ChaosKernel& g) {
  const ChaosKernel fs[2] = {f, g};
  return symmetrized_product(fs);
}

double symmetry_defect(const ChaosKernel& f) {
  const int n = f.degree();
  const std::size_t d = std::size_t(f.dim());
  double worst = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto blk = f.block(i);
    for (int j = 0; j + 1 < n; ++j) {
      if (f.key(i)[std::size_t(j)] != f.key(i)[std::size_t(j + 1)]) continue;
      const std::size_t sj = ipow(d, n - 1 - j);
      const std::size_t sj1 = ipow(d, n - 2 - j);
      for (std::size_t idx = 0; idx < blk.size(); ++idx) {
        const std::size_t lj = (idx / sj) % d;
        const std::size_t lj1 = (idx / sj1) % d;
        const std::size_t swapped = idx - lj * sj - lj1 * sj1 + lj1 * sj + lj * sj1;
        worst = std::max(worst, std::abs(blk[idx] - blk[swapped]));
      }
    }
  }
  return worst;
}

double divergence_defect(const ChaosKernel& f) {
  const int n = f.degree();
  const std::size_t d = std::size_t(f.dim());
  double worst = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto blk = f.block(i);
    for (int j = 0; j < n; ++j) {
      const WaveVector kj = f.leg(i, j);
      const std::size_t sj = ipow(d, n - 1 - j);
      for (std::size_t idx = 0; idx < blk.size(); ++idx) {
        if ((idx / sj) % d != 0) continue;
        cplx s = 0.0;
        for (std::size_t l = 0; l < d; ++l) s += double(kj[int(l)]) * blk[idx + l * sj];
        worst = std::max(worst, std::abs(s));
      }
    }
  }
  return worst;
}

ChaosKernel random_kernel(int degree, const WaveVector& K,
                          const std::vector<WaveVector>& points, int terms,
                          std::uint64_t seed) {
  if (points.empty()) throw InvalidInput("empty point set");
  const int d = K.dim;
  std::vector<std::uint64_t> packed;
  packed.reserve(points.size());
  for (const auto& p : points) packed.push_back(pack(p));
  std::sort(packed.begin(), packed.end());
  rng::Stream s(seed, 0x5EED);
  ChaosKernel acc(d, degree);
  int made = 0;
  for (int attempt = 0; made < terms && attempt < 1000 * terms; ++attempt) {
    std::vector<WaveVector> legs;
    WaveVector rest = K;
    for (int j = 0; j + 1 < degree; ++j) {
      const auto& p = points[std::size_t(s.next_u32() % points.size())];
      legs.push_back(p);
      rest = rest - p;
    }
    if (rest.is_zero() || !std::binary_search(packed.begin(), packed.end(), pack(rest))) {
      continue;
    }
    legs.push_back(rest);
    std::vector<ChaosKernel> factors;
    for (const auto& k : legs) {
      const int alpha = 1 + int(s.next_u32() % std::uint32_t(d - 1));
      factors.push_back(sigma_kernel(k, alpha));
    }
    const cplx w(s.normal(), s.normal());
    acc = combine(1.0, acc, w, symmetrized_product(factors));
    ++made;
  }
  if (made == 0) throw InvalidInput("no tuple in the point set reaches momentum " + K.str());
  acc.declare_momentum(K);
  return acc;
}

}  // namespace llns::fock
