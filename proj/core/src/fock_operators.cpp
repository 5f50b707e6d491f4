// Copyright 2026 The llns authors
// SPDX-License-Identifier: Apache-2.0
#include "llns/fock_operators.hpp"

#include <algorithm>
#include <cmath>

#include "llns/error.hpp"
#include "llns/philox.hpp"

namespace llns::fock {
namespace {

double laplace_weight(const ChaosKernel& f, std::size_t i) {
  double s = 0.0;
  for (int j = 0; j < f.degree(); ++j) s += double(f.leg(i, j).norm2());
  return (kTwoPi * kTwoPi) * s;
}

// Iterates all digit strings of length `len` over [0, d).
template <class F>
void for_each_digits(int len, std::size_t d, F&& fn) {
  std::array<std::size_t, kMaxLegs> r{};
  while (true) {
    fn(r);
    int m = len - 1;
    for (; m >= 0; --m) {
      if (++r[std::size_t(m)] < d) break;
      r[std::size_t(m)] = 0;
    }
    if (m < 0) return;
  }
}

struct Tagged {
  std::uint64_t key;
  int tag;
};

}  // namespace

ChaosKernel apply_L0_power(const ChaosKernel& f, double s) {
  ChaosKernel out = f;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double w = std::pow(laplace_weight(f, i), s);
    for (auto& v : out.block(i)) v *= w;
  }
  return out;
}

ChaosKernel apply_momentum(int axis, const ChaosKernel& f) {
  if (axis < 0 || axis >= f.dim()) throw InvalidInput("momentum axis out of range");
  ChaosKernel out = f;
  for (std::size_t i = 0; i < out.size(); ++i) {
    double s = 0.0;
    for (int j = 0; j < f.degree(); ++j) s += f.leg(i, j)[axis];
    for (auto& v : out.block(i)) v *= s;
  }
  return out;
}

ChaosKernel apply_Aplus(const ChaosKernel& f, const ModelParams& p) {
  const int n = f.degree();
  const int dim = f.dim();
  const std::size_t d = std::size_t(dim);
  if (n + 1 > kMaxLegs) throw InvalidInput("A+ output degree exceeds the supported range");
  KernelBuilder b(dim, n + 1);
  b.set_momentum(f.momentum());
  if (f.empty()) return std::move(b).finish();

  const auto ball = ball_points(p);
  const cplx c(0.0, p.lambda_N() * kTwoPi / double(n + 1));
  std::array<std::size_t, kMaxLegs> sst{}, ost{};
  for (int m = 0; m < n; ++m) sst[std::size_t(m)] = ipow(d, n - 1 - m);
  for (int m = 0; m <= n; ++m) ost[std::size_t(m)] = ipow(d, n - m);

  std::vector<Tagged> tagged(std::size_t(n + 1));
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto legs = f.legs(i);
    const auto blk = f.block(i);
    for (int s = 0; s < n; ++s) {
      if (s > 0 && legs[std::size_t(s)] == legs[std::size_t(s - 1)]) continue;
      const WaveVector v = legs[std::size_t(s)];
      if (!p.in_ball(v)) continue;
      std::array<int, kMaxLegs> srcpos{};
      for (int m = 0, t = 0; m < n; ++m) {
        if (m != s) srcpos[std::size_t(t++)] = m;
      }
      const Vec vr = v.as_real();
      for (const WaveVector& pp : *ball) {
        const WaveVector q = v - pp;
        if (q.is_zero() || !p.in_ball(q)) continue;
        const std::uint64_t kp = pack(pp), kq = pack(q);
        for (int m = 0; m < n - 1; ++m) {
          tagged[std::size_t(m)] = {pack(legs[std::size_t(srcpos[std::size_t(m)])]), m};
        }
        tagged[std::size_t(n - 1)] = {kp, -1};
        tagged[std::size_t(n)] = {kq, -2};
        std::sort(tagged.begin(), tagged.end(),
                  [](const Tagged& a, const Tagged& b2) { return a.key < b2.key; });
        TupleKey key{};
        for (int m = 0; m <= n; ++m) key[std::size_t(m)] = tagged[std::size_t(m)].key;

        // u = P(p)(p+q), Pq = P(q)
        const Vec pr = pp.as_real();
        const double pv = dot(pr, vr) / double(pp.norm2());
        Vec u{};
        for (std::size_t l = 0; l < d; ++l) u[l] = vr[l] - pv * pr[l];
        const Mat Pq = basis::leray_matrix(q);

        auto out = b.block(key);
        for (int oi = 0; oi <= n; ++oi) {
          if (key[std::size_t(oi)] != kp) continue;
          for (int oj = 0; oj <= n; ++oj) {
            if (oj == oi || key[std::size_t(oj)] != kq) continue;
            std::array<int, kMaxLegs> outrest{};
            for (int m = 0, t = 0; m <= n; ++m) {
              if (m != oi && m != oj) outrest[std::size_t(t++)] = m;
            }
            for_each_digits(n - 1, d, [&](const std::array<std::size_t, kMaxLegs>& r) {
              std::size_t sb = 0, ob = 0;
              for (int m = 0; m < n - 1; ++m) {
                sb += r[std::size_t(m)] * sst[std::size_t(srcpos[std::size_t(m)])];
                ob += r[std::size_t(m)] * ost[std::size_t(outrest[std::size_t(m)])];
              }
              std::array<cplx, 3> g{}, w{};
              for (std::size_t t = 0; t < d; ++t) g[t] = blk[sb + t * sst[std::size_t(s)]];
              for (std::size_t l = 0; l < d; ++l) {
                for (std::size_t t = 0; t < d; ++t) w[l] += Pq[l][t] * g[t];
              }
              for (std::size_t li = 0; li < d; ++li) {
                if (u[li] == 0.0) continue;
                const cplx cu = c * u[li];
                const std::size_t base = ob + li * ost[std::size_t(oi)];
                for (std::size_t lj = 0; lj < d; ++lj) {
                  out[base + lj * ost[std::size_t(oj)]] += cu * w[lj];
                }
              }
            });
          }
        }
      }
    }
  }
  return std::move(b).finish();
}

ChaosKernel apply_Aminus(const ChaosKernel& f, const ModelParams& p) {
  const int n = f.degree();
  const int dim = f.dim();
  const std::size_t d = std::size_t(dim);
  if (n < 2) {
    ChaosKernel zero(dim, 1);
    return zero;
  }
  KernelBuilder b(dim, n - 1);
  b.set_momentum(f.momentum());
  const cplx c(0.0, p.lambda_N() * kTwoPi * double(n));
  std::array<std::size_t, kMaxLegs> sst{}, ost{};
  for (int m = 0; m < n; ++m) sst[std::size_t(m)] = ipow(d, n - 1 - m);
  for (int m = 0; m < n - 1; ++m) ost[std::size_t(m)] = ipow(d, n - 2 - m);

  std::vector<Tagged> tagged(std::size_t(n - 1));
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto legs = f.legs(i);
    const auto blk = f.block(i);
    for (int a = 0; a < n; ++a) {
      if (a > 0 && legs[std::size_t(a)] == legs[std::size_t(a - 1)]) continue;
      for (int bb = 0; bb < n; ++bb) {
        if (bb == a) continue;
        bool repeat = false;
        for (int e = 0; e < bb && !repeat; ++e) {
          repeat = e != a && legs[std::size_t(e)] == legs[std::size_t(bb)];
        }
        if (repeat) continue;
        const WaveVector& pp = legs[std::size_t(a)];
        const WaveVector& q = legs[std::size_t(bb)];
        const WaveVector v = pp + q;
        if (v.is_zero() || !p.mollifier(pp, q)) continue;

        std::array<int, kMaxLegs> restpos{};
        for (int m = 0, t = 0; m < n; ++m) {
          if (m != a && m != bb) restpos[std::size_t(t++)] = m;
        }
        for (int m = 0; m < n - 2; ++m) {
          tagged[std::size_t(m)] = {pack(legs[std::size_t(restpos[std::size_t(m)])]), m};
        }
        const std::uint64_t kv = pack(v);
        tagged[std::size_t(n - 2)] = {kv, -1};
        std::sort(tagged.begin(), tagged.end(),
                  [](const Tagged& x, const Tagged& y) { return x.key < y.key; });
        TupleKey key{};
        for (int m = 0; m < n - 1; ++m) key[std::size_t(m)] = tagged[std::size_t(m)].key;

        const Vec vr = v.as_real();
        const Mat Pv = basis::leray_matrix(v);
        auto out = b.block(key);
        for (int oj = 0; oj < n - 1; ++oj) {
          if (key[std::size_t(oj)] != kv) continue;
          std::array<int, kMaxLegs> outrest{};
          for (int m = 0, t = 0; m < n - 1; ++m) {
            if (m != oj) outrest[std::size_t(t++)] = m;
          }
          for_each_digits(n - 2, d, [&](const std::array<std::size_t, kMaxLegs>& r) {
            std::size_t sb = 0, ob = 0;
            for (int m = 0; m < n - 2; ++m) {
              sb += r[std::size_t(m)] * sst[std::size_t(restpos[std::size_t(m)])];
              ob += r[std::size_t(m)] * ost[std::size_t(outrest[std::size_t(m)])];
            }
            std::array<cplx, 3> h{};
            for (std::size_t t = 0; t < d; ++t) {
              for (std::size_t ii = 0; ii < d; ++ii) {
                h[t] += vr[ii] * blk[sb + t * sst[std::size_t(a)] + ii * sst[std::size_t(bb)]];
              }
            }
            for (std::size_t lj = 0; lj < d; ++lj) {
              cplx w = 0.0;
              for (std::size_t t = 0; t < d; ++t) w += Pv[lj][t] * h[t];
              out[ob + lj * ost[std::size_t(oj)]] += c * w;
            }
          });
        }
      }
    }
  }
  return std::move(b).finish();
}

ChaosKernel apply_T(Sign sign, const ChaosKernel& f, const ModelParams& p) {
  const ChaosKernel g = apply_L0_power(f, -0.5);
  const ChaosKernel ag = sign == Sign::plus ? apply_Aplus(g, p) : apply_Aminus(g, p);
  return apply_L0_power(ag, -0.5);
}

FockVector::FockVector(int dim, int lo, int hi) : dim_(dim), lo_(lo), hi_(hi) {
  if (lo < 1 || hi < lo || hi > kMaxLegs) throw InvalidInput("bad degree range");
  for (int j = lo; j <= hi; ++j) parts_.emplace_back(dim, j);
}

FockVector FockVector::single(const ChaosKernel& f, int lo, int hi) {
  FockVector v(f.dim(), lo, hi);
  v.at(f.degree()) = f;
  return v;
}

ChaosKernel& FockVector::at(int degree) {
  if (degree < lo_ || degree > hi_) throw InvalidInput("degree outside the truncation");
  return parts_[std::size_t(degree - lo_)];
}

const ChaosKernel& FockVector::at(int degree) const {
  if (degree < lo_ || degree > hi_) throw InvalidInput("degree outside the truncation");
  return parts_[std::size_t(degree - lo_)];
}

std::size_t FockVector::bytes() const {
  std::size_t s = 0;
  for (const auto& k : parts_) s += k.bytes();
  return s;
}

FockVector combine(cplx a, const FockVector& x, cplx b, const FockVector& y) {
  FockVector out(x.dim(), x.lo(), x.hi());
  for (int j = x.lo(); j <= x.hi(); ++j) out.at(j) = combine(a, x.at(j), b, y.at(j));
  return out;
}

cplx inner(const FockVector& f, const FockVector& g) {
  cplx s = 0.0;
  for (int j = f.lo(); j <= f.hi(); ++j) s += inner(f.at(j), g.at(j));
  return s;
}

double norm2(const FockVector& f) { return inner(f, f).real(); }

FockVector apply_L0_power(const FockVector& f, double s) {
  FockVector out(f.dim(), f.lo(), f.hi());
  for (int j = f.lo(); j <= f.hi(); ++j) out.at(j) = apply_L0_power(f.at(j), s);
  return out;
}

FockVector apply_A(const FockVector& f, const ModelParams& p) {
  FockVector out(f.dim(), f.lo(), f.hi());
  for (int j = f.lo(); j <= f.hi(); ++j) {
    ChaosKernel acc(f.dim(), j);
    if (j - 1 >= f.lo()) acc = acc + apply_Aplus(f.at(j - 1), p);
    if (j + 1 <= f.hi()) acc = acc + apply_Aminus(f.at(j + 1), p);
    out.at(j) = std::move(acc);
  }
  return out;
}

FockVector apply_T(const FockVector& f, const ModelParams& p) {
  return apply_L0_power(apply_A(apply_L0_power(f, -0.5), p), -0.5);
}

FockVector apply_T_adjoint(const FockVector& f, const ModelParams& p) {
  return combine(-1.0, apply_T(f, p), 0.0, f);
}

ResolventResult resolvent_solve(const FockVector& rhs, const ModelParams& p,
                                const SolverOptions& opts) {
  const double rhs_norm = std::sqrt(norm2(rhs));
  if (rhs_norm == 0.0) return {rhs, 0, 0.0};

  // (I - T) y = b, b = (-L0)^{-1/2} rhs, v = (-L0)^{-1/2} y.
  // Normal equations: (I - T^2) y = (I + T) b.
  const FockVector b = apply_L0_power(rhs, -0.5);
  auto normal_op = [&](const FockVector& x) {
    const FockVector z = combine(1.0, x, -1.0, apply_T(x, p));
    return combine(1.0, z, 1.0, apply_T(z, p));
  };
  auto true_residual = [&](const FockVector& y) {
    const FockVector r = combine(1.0, combine(1.0, y, -1.0, apply_T(y, p)), -1.0, b);
    return std::sqrt(norm2(apply_L0_power(r, 0.5))) / rhs_norm;
  };

  FockVector y = combine(0.0, b, 0.0, b);
  FockVector r = combine(1.0, b, 1.0, apply_T(b, p));
  FockVector dir = r;
  double rr = norm2(r);
  const double target = 0.1 * opts.tolerance * std::sqrt(norm2(b));
  int it = 0;
  double res = 1.0;
  while (true) {
    if (std::sqrt(rr) <= target || it >= opts.max_iterations) {
      res = true_residual(y);
      if (res <= opts.tolerance) break;
      if (it >= opts.max_iterations) {
        throw ConvergenceError("resolvent solve did not converge, residual " +
                                   std::to_string(res),
                               res, it);
      }
      if (std::sqrt(rr) <= target * 1e-6) {
        throw ConvergenceError("resolvent solve stagnated, residual " + std::to_string(res),
                               res, it);
      }
    }
    const FockVector Ad = normal_op(dir);
    const double alpha = rr / inner(dir, Ad).real();
    y = combine(1.0, y, alpha, dir);
    r = combine(1.0, r, -alpha, Ad);
    const double rr_new = norm2(r);
    dir = combine(1.0, r, rr_new / rr, dir);
    rr = rr_new;
    ++it;
  }
  return {apply_L0_power(y, -0.5), it, res};
}

double estimate_kernel_bytes(const ModelParams& p, int degree) {
  const auto pts = ball_points(p);
  const double ball = double(pts->size());
  // fraction of (degree-1)-tuples whose closing leg is also retained,
  // sampled with a fixed stream so the estimate is reproducible
  double closing = 1.0;
  if (degree >= 3) {
    rng::Stream s(0x5eed, 0);
    const int draws = 4096;
    int hits = 0;
    for (int i = 0; i < draws; ++i) {
      WaveVector sum = WaveVector::of(p.dim, {0, 0, 0});
      for (int m = 0; m + 1 < degree; ++m) {
        const auto j = std::min(pts->size() - 1, std::size_t(s.uniform() * ball));
        sum = sum + (*pts)[j];
      }
      hits += p.in_ball(sum) ? 1 : 0;
    }
    // one-sided margin of two binomial standard errors
    const double f = double(hits) / draws;
    closing = std::min(1.0, f + 2.0 * std::sqrt(f * (1.0 - f) / draws) + 1.0 / draws);
  }
  const double keys = closing * std::pow(ball, degree - 1) / factorial(degree);
  const double per_key = sizeof(TupleKey) + 64.0 +
                         16.0 * double(ipow(std::size_t(p.dim), degree));
  return keys * per_key;
}

}  // namespace llns::fock
