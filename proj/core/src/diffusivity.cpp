// Copyright 2026 The llns authors
// SPDX-License-Identifier: Apache-2.0
#include "llns/diffusivity.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numeric>
#include <thread>

#include "llns/error.hpp"
#include "llns/philox.hpp"

namespace llns::diffusivity {
namespace {

Vec project(const Vec& x, const Vec& v) {
  const double s = dot(x, v) / dot(x, x);
  return {v[0] - s * x[0], v[1] - s * x[1], v[2] - s * x[2]};
}

Vec add(const Vec& a, const Vec& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
Vec neg(const Vec& a) { return {-a[0], -a[1], -a[2]}; }

double vnorm(const Vec& x, MollifierNorm norm) {
  if (norm == MollifierNorm::sup) {
    return std::max({std::abs(x[0]), std::abs(x[1]), std::abs(x[2])});
  }
  return std::sqrt(dot(x, x));
}

// Orthonormal pair spanning x-perp.
std::array<Vec, 2> real_frame(const Vec& x) {
  const double n = std::sqrt(dot(x, x));
  const Vec h{x[0] / n, x[1] / n, x[2] / n};
  int axis = 0;
  for (int i = 1; i < 3; ++i) {
    if (std::abs(h[std::size_t(i)]) < std::abs(h[std::size_t(axis)])) axis = i;
  }
  Vec e{0, 0, 0};
  e[std::size_t(axis)] = 1.0;
  Vec a = project(h, e);
  const double an = std::sqrt(dot(a, a));
  for (auto& v : a) v /= an;
  return {a, cross(h, a)};
}

double mem_check(const ModelParams& p, int max_degree, double vectors, double budget,
                 const std::string& what) {
  double bytes = 0.0;
  for (int m = 2; m <= max_degree; ++m) bytes += fock::estimate_kernel_bytes(p, m);
  bytes *= vectors;
  if (bytes > budget) {
    throw ResourceLimit(what + " needs an estimated " + std::to_string(bytes / 1e9) +
                            " GB, budget " + std::to_string(budget / 1e9) + " GB",
                        bytes);
  }
  return bytes;
}

}  // namespace

double d2_effective_D(double lambda) {
  if (lambda < 0) throw InvalidInput("lambda must be >= 0");
  return std::sqrt(lambda * lambda / (8.0 * kPi) + 1.0) - 1.0;
}

double replacement_G(double x) { return std::sqrt(x / (16.0 * kPi) + 1.0) - 1.0; }

double replacement_L(double x, const ModelParams& p) {
  const double ln = p.lambda_N();
  return ln * ln * std::log1p(p.N * p.N / x);
}

double replacement_kernel_PN(const std::vector<WaveVector>& ks, const ModelParams& p) {
  if (p.dim != 2) throw InvalidInput("replacement kernel is defined for d=2");
  if (ks.empty()) throw InvalidInput("need at least one wavevector");
  for (const auto& k : ks) {
    if (k.is_zero() || k.dim != 2) throw InvalidInput("wavevectors must be nonzero, d=2");
  }
  const WaveVector k1 = ks[0];
  double rest = 0.0;
  for (std::size_t i = 1; i < ks.size(); ++i) rest += double(ks[i].norm2());
  if (!p.in_ball(k1)) return 0.0;
  const double k1n = k1.norm();
  const double lam = p.lambda_N();
  const double four_pi2 = kTwoPi * kTwoPi;
  double sum = 0.0;
  for (const WaveVector& l : *ball_points(p)) {
    const WaveVector m = k1 - l;
    if (m.is_zero() || !p.in_ball(m)) continue;
    const double ln = l.norm(), mn = m.norm();
    const double c1 = (k1[0] * m[0] + k1[1] * m[1]) / (k1n * mn);
    const double c2 = (k1[0] * l[0] + k1[1] * l[1]) / (k1n * ln);
    const double s1 = 1.0 - c1 * c1, s2 = 1.0 - c2 * c2;
    const double ang = s1 - s2 * (s1 + (ln / mn) * c1 * c2);
    const double x = four_pi2 * (double(l.norm2()) + double(m.norm2()) + rest);
    sum += ang / (x * (1.0 + replacement_G(replacement_L(x, p))));
  }
  return lam * lam * sum;
}

double replacement_deviation(const std::vector<WaveVector>& ks, const ModelParams& p) {
  double all = 0.0;
  for (const auto& k : ks) all += double(k.norm2());
  const double target = replacement_G(replacement_L(kTwoPi * kTwoPi * all, p));
  return std::abs(replacement_kernel_PN(ks, p) - target);
}

double D_rep(double c, double lambda) {
  if (c < 0 || lambda < 0) throw InvalidInput("D_rep needs c >= 0 and lambda >= 0");
  const double q = 4.0 * c * lambda * lambda;
  // (-1 + sqrt(1+q))/2 without cancellation
  return q / (2.0 * (1.0 + std::sqrt(1.0 + q)));
}

double nu_eff(double lambda) { return std::sqrt(1.0 + lambda * lambda / kPi); }

double f2_quoted() { return 8.588 / (2.0 * std::pow(kTwoPi, 4)); }

QuadratureResult f1_sphere_quadrature(MollifierNorm norm, const Vec& k, const Vec& a,
                                      double tol) {
  using boost::math::quadrature::gauss_kronrod;
  const double k2 = dot(k, k);
  double err_total = 0.0;
  auto angular = [&](double th, double ph) {
    const Vec x{std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)};
    const Vec pk = project(x, k);
    const Vec pa = project(x, a);
    const double kpa = dot(k, pa);
    const double g = 0.5 * (dot(pk, pk) * dot(pa, pa) + kpa * kpa);
    // radial integral of r^2 / r^2 up to the boundary of the unit ball
    return g / vnorm(x, norm);
  };
  auto outer = [&](double th) {
    double e = 0.0;
    const double v = gauss_kronrod<double, 31>::integrate(
        [&](double ph) { return angular(th, ph); }, 0.0, kTwoPi, 15, tol, &e);
    err_total = std::max(err_total, e);
    return v * std::sin(th);
  };
  double err = 0.0;
  const double v = gauss_kronrod<double, 31>::integrate(outer, 0.0, kPi, 15, tol, &err);
  const double scale = 1.0 / (kTwoPi * kTwoPi * k2);
  if (!std::isfinite(v)) throw ComputationError("sphere quadrature produced a non-finite value");
  return {v * scale, (err + kPi * err_total) * scale};
}

double f1_lattice(const ModelParams& p, const WaveVector& k, basis::FrameRule rule) {
  const auto s = fock::sigma_kernel(k, 1, rule);
  return fock::norm2(fock::apply_T(fock::Sign::plus, s, p.with_lambda(1.0)));
}

double richardson(double N1, double v1, double N2, double v2) {
  return (N2 * v2 - N1 * v1) / (N2 - N1);
}

F1Routes f1_d3(double N1, double N2, MollifierNorm norm, bool with_lattice) {
  F1Routes r;
  r.quadrature = f1_sphere_quadrature(norm);
  if (norm == MollifierNorm::sup) r.closed_form = std::nan("");
  if (with_lattice) {
    const WaveVector k(1, 0, 0);
    r.lattice_N1 = N1;
    r.lattice_N2 = N2;
    r.lattice_v1 = f1_lattice(ModelParams::make(3, 1.0, N1).with_norm(norm), k);
    r.lattice_v2 = f1_lattice(ModelParams::make(3, 1.0, N2).with_norm(norm), k);
    r.lattice_extrapolated = richardson(N1, r.lattice_v1, N2, r.lattice_v2);
  }
  return r;
}

double f2_integrand(const Vec& x1, const Vec& x2, MollifierNorm norm, const Vec& k,
                    const Vec& a) {
  const Vec x3 = neg(add(x1, x2));
  const std::array<Vec, 3> xs{x1, x2, x3};
  for (const auto& x : xs) {
    if (vnorm(x, norm) > 1.0 || dot(x, x) == 0.0) return 0.0;
  }
  const std::array<std::array<Vec, 2>, 3> fr{real_frame(x1), real_frame(x2), real_frame(x3)};

  // C for the ordering (y1,y2,y3) = (x_{s0}, x_{s1}, x_{s2}) with frame indices.
  auto coeff = [&](const std::array<int, 3>& s, const std::array<int, 3>& al) {
    const Vec& y1 = xs[std::size_t(s[0])];
    const Vec& y2 = xs[std::size_t(s[1])];
    const Vec& y3 = xs[std::size_t(s[2])];
    const Vec& a1 = fr[std::size_t(s[0])][std::size_t(al[0])];
    const Vec& a2 = fr[std::size_t(s[1])][std::size_t(al[1])];
    const Vec& a3 = fr[std::size_t(s[2])][std::size_t(al[2])];
    const Vec y12 = add(y1, y2);
    const Vec pa1 = project(y12, a1);
    const double den = dot(y12, y12) + dot(y3, y3);
    return dot(y1, a2) / den * (dot(k, pa1) * dot(a3, a) + dot(a, pa1) * dot(a3, k));
  };

  double total = 0.0;
  std::array<int, 3> sigma{0, 1, 2};
  do {
    for (int m = 0; m < 8; ++m) {
      const std::array<int, 3> al{m & 1, (m >> 1) & 1, (m >> 2) & 1};
      const std::array<int, 3> al_s{al[std::size_t(sigma[0])], al[std::size_t(sigma[1])],
                                    al[std::size_t(sigma[2])]};
      total += coeff({0, 1, 2}, al) * coeff(sigma, al_s);
    }
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  const double den = dot(x1, x1) + dot(x2, x2) + dot(x3, x3);
  return total / den / (std::pow(kTwoPi, 4) * dot(k, k));
}

MonteCarloResult f2_d3(const MonteCarloOptions& o) {
  if (o.partitions < 1 || o.batches < 1 || o.accepted_samples < std::uint64_t(o.batches)) {
    throw InvalidInput("Monte Carlo needs partitions >= 1 and at least one sample per batch");
  }
  const double R = o.norm == MollifierNorm::sup ? std::sqrt(3.0) : 1.0;
  const int P = o.partitions;
  const int per_part_batches = std::max(1, o.batches / P);

  struct Part {
    std::vector<double> batch_values;
    double sum = 0.0;
    std::uint64_t accepted = 0, proposed = 0;
  };
  std::vector<Part> parts(static_cast<std::size_t>(P));

  auto q1 = [R](const Vec& x) { return 1.0 / (4.0 * kPi * R * dot(x, x)); };
  auto run_part = [&](int pi) {
    rng::Stream s(o.seed, std::uint64_t(pi));
    Part& part = parts[std::size_t(pi)];
    const std::uint64_t target =
        o.accepted_samples / std::uint64_t(P) + (std::uint64_t(pi) < o.accepted_samples % std::uint64_t(P) ? 1 : 0);
    auto ball = [&]() {
      const double r = R * s.uniform();
      Vec d{s.normal(), s.normal(), s.normal()};
      const double n = std::sqrt(dot(d, d));
      return Vec{r * d[0] / n, r * d[1] / n, r * d[2] / n};
    };
    for (int b = 0; b < per_part_batches; ++b) {
      const std::uint64_t want = target / std::uint64_t(per_part_batches) +
                                 (b == per_part_batches - 1 ? target % std::uint64_t(per_part_batches) : 0);
      double bsum = 0.0;
      std::uint64_t acc = 0, prop = 0;
      while (acc < want) {
        const std::uint32_t ch = s.next_u32() % 3u;
        const Vec va = ball();
        const Vec vb = ball();
        Vec x1, x2;
        if (ch == 0) {
          x1 = va;
          x2 = vb;
        } else if (ch == 1) {
          x1 = va;
          x2 = neg(add(va, vb));  // (x1, x3) = (a, b)
        } else {
          x2 = va;
          x1 = neg(add(va, vb));  // (x2, x3) = (a, b)
        }
        ++prop;
        const Vec x3 = neg(add(x1, x2));
        if (vnorm(x1, o.norm) > 1.0 || vnorm(x2, o.norm) > 1.0 || vnorm(x3, o.norm) > 1.0) {
          continue;
        }
        ++acc;
        const std::array<Vec, 3> xs{x1, x2, x3};
        double q = 0.0;
        for (auto [i, j] : {std::pair{0, 1}, std::pair{0, 2}, std::pair{1, 2}}) {
          q += q1(xs[std::size_t(i)]) * q1(xs[std::size_t(j)]) / 3.0;
        }
        bsum += f2_integrand(x1, x2, o.norm) / q;
      }
      part.batch_values.push_back(bsum / double(prop));
      part.sum += bsum;
      part.accepted += acc;
      part.proposed += prop;
    }
  };

  const int T = std::max(1, std::min(o.threads, P));
  if (T == 1) {
    for (int pi = 0; pi < P; ++pi) run_part(pi);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < T; ++t) {
      pool.emplace_back([&, t] {
        for (int pi = t; pi < P; pi += T) run_part(pi);
      });
    }
    for (auto& th : pool) th.join();
  }

  MonteCarloResult r;
  double sum = 0.0;
  std::vector<double> batches;
  for (const auto& part : parts) {
    sum += part.sum;
    r.accepted += part.accepted;
    r.proposed += part.proposed;
    batches.insert(batches.end(), part.batch_values.begin(), part.batch_values.end());
  }
  r.value = sum / double(r.proposed);
  const double B = double(batches.size());
  if (batches.size() > 1) {
    const double mean = std::accumulate(batches.begin(), batches.end(), 0.0) / B;
    double ss = 0.0;
    for (double v : batches) ss += (v - mean) * (v - mean);
    r.stderr_ = std::sqrt(ss / (B - 1.0) / B);
  } else {
    r.stderr_ = std::nan("");
  }
  return r;
}

double fl_lattice(int l, const ModelParams& p, const WaveVector& k, double budget) {
  if (l < 1) throw InvalidInput("expansion order must be >= 1");
  if (p.degree < l + 1 && l > 1) {
    throw InvalidInput("truncation degree n must be >= l+1");
  }
  const int top = std::min(l + 1, p.degree);
  mem_check(p, top, 3.0, budget, "expansion coefficient of order " + std::to_string(l));
  const ModelParams q = p.with_lambda(1.0);
  const auto s = fock::sigma_kernel(k, 1);
  const int hi = std::max(2, p.degree);
  auto v = fock::FockVector::single(fock::apply_T(fock::Sign::plus, s, q), 2, hi);
  for (int i = 1; i < l; ++i) v = fock::apply_T_adjoint(v, q);
  const double sign = (l % 2 == 1) ? 1.0 : -1.0;
  return sign * fock::norm2(v);
}

TruncatedD D_truncated(const ModelParams& p, const WaveVector& k, basis::FrameRule rule,
                       const fock::SolverOptions& opts) {
  if (p.degree < 2) throw InvalidInput("D_truncated needs n >= 2");
  mem_check(p, p.degree, 8.0, 4.0e9, "truncated diffusivity");
  const auto s = fock::sigma_kernel(k, 1, rule);
  const auto rhs = fock::FockVector::single(fock::apply_Aplus(s, p), 2, p.degree);
  const auto res = fock::resolvent_solve(rhs, p, opts);
  const cplx q = fock::inner(rhs, res.solution);
  const double w = kTwoPi * kTwoPi * double(k.norm2());
  return {q.real() / w, q.imag() / w, res.iterations, res.residual};
}

cplx path_sum(int a, const ModelParams& p, const WaveVector& j, int t, const WaveVector& jp,
              int tp) {
  if (a < 2 || a % 2 != 0) throw InvalidInput("path length must be even and >= 2");
  if (a > 2 * (p.degree - 1)) throw InvalidInput("path length exceeds 2(n-1)");
  const auto s = fock::sigma_kernel(j, t);
  auto v = fock::FockVector::single(fock::apply_T(fock::Sign::plus, s, p), 2, p.degree);
  for (int i = 0; i < a - 2; ++i) v = fock::apply_T(v, p);
  const auto back = fock::apply_T(fock::Sign::minus, v.at(2), p);
  return fock::inner(fock::sigma_kernel(jp, tp), back);
}

double sector_constant_fit(const ModelParams& p, const WaveVector& K, int max_degree,
                           int samples, std::uint64_t seed) {
  const auto ball = ball_points(p);
  const double lam2 = p.lambda * p.lambda;
  double worst = 0.0;
  auto ratio = [&](const fock::ChaosKernel& phi) {
    const double den = lam2 * phi.degree() * fock::norm2(fock::apply_L0_power(phi, 0.5));
    if (den == 0.0) return 0.0;
    double best = 0.0;
    for (auto sign : {fock::Sign::plus, fock::Sign::minus}) {
      if (sign == fock::Sign::minus && phi.degree() < 2) continue;
      const auto a = sign == fock::Sign::plus ? fock::apply_Aplus(phi, p)
                                              : fock::apply_Aminus(phi, p);
      best = std::max(best, fock::norm2(fock::apply_L0_power(a, -0.5)) / den);
    }
    return best;
  };
  for (int alpha = 1; alpha < p.dim; ++alpha) {
    worst = std::max(worst, ratio(fock::sigma_kernel(K, alpha)));
  }
  for (int n = 1; n <= max_degree; ++n) {
    for (int i = 0; i < samples; ++i) {
      const auto phi = fock::random_kernel(n, K, *ball, 3, seed + std::uint64_t(97 * n + i));
      worst = std::max(worst, ratio(phi));
    }
  }
  return worst;
}

CorollaryReport corollary_check(const std::vector<double>& lambdas, double f2,
                                double f2_stderr) {
  CorollaryReport rep;
  for (double l : lambdas) {
    if (!(l > 0.0) || l > 4.0) throw InvalidInput("corollary grid must lie in (0, 4]");
    CorollaryRow row{l, kF1ClosedForm * l * l, nu_eff(l) - 1.0, D_rep(kF1ClosedForm, l), false};
    row.holds = row.first_order < row.nu_minus_one;
    if (!row.holds && rep.failure.empty()) rep.failure = "lambda=" + std::to_string(l);
    rep.first_order_below_nu = rep.first_order_below_nu && row.holds;
    rep.rows.push_back(row);
  }
  rep.f2 = f2;
  rep.f2_stderr = f2_stderr;
  rep.f1_squared = kF1ClosedForm * kF1ClosedForm;
  rep.gap_in_stderr = std::abs(rep.f1_squared - f2) / f2_stderr;
  rep.second_order_gap = rep.gap_in_stderr > 10.0;
  if (!rep.second_order_gap && rep.failure.empty()) rep.failure = "second-order gap";
  return rep;
}

}  // namespace llns::diffusivity
