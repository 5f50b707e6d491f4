// Copyright 2026 The llns authors
// SPDX-License-Identifier: Apache-2.0
#include "cli/verify_suite.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "llns/chaos_kernel.hpp"
#include "llns/diffusivity.hpp"
#include "llns/error.hpp"
#include "llns/fock_operators.hpp"
#include "llns/philox.hpp"

namespace llns::cli {
namespace {

struct Instance {
  int d;
  double N;
  WaveVector K;
  int n;
};

const std::vector<Instance>& instances() {
  static const std::vector<Instance> all{{3, 2.5, WaveVector(1, 0, 0), 2},
                                         {3, 2.5, WaveVector(1, 1, 0), 3},
                                         {2, 4, WaveVector(1, 0), 2},
                                         {2, 4, WaveVector(1, 1), 3}};
  return all;
}

std::string label(const Instance& in) {
  return fmt::format("d={} N={} K={} n={}", in.d, in.N, in.K.str(), in.n);
}

}  // namespace

CheckResult check_adjointness(std::uint64_t seed) {
  CheckResult r;
  r.name = "adjointness";
  double worst_adj = 0.0, worst_pres = 0.0, worst_skew = 0.0;
  std::string failure;
  for (const auto& in : instances()) {
    const auto p = ModelParams::make(in.d, 1.0, in.N, in.n + 1);
    const auto& pts = *ball_points(p);
    const auto f = fock::random_kernel(in.n, in.K, pts, 6, seed);
    const auto g = fock::apply_Aplus(fock::random_kernel(in.n, in.K, pts, 6, seed + 1), p) +
                   fock::random_kernel(in.n + 1, in.K, pts, 6, seed + 2);
    const auto Af = fock::apply_Aplus(f, p);
    const auto Ag = fock::apply_Aminus(g, p);
    const cplx lhs = fock::inner(Af, g);
    const cplx rhs = -fock::inner(f, Ag);
    const double adj = std::abs(lhs - rhs) / std::max(std::abs(lhs), 1e-300);
    if (std::abs(lhs) == 0.0 && failure.empty()) failure = label(in) + ": empty overlap";
    worst_adj = std::max(worst_adj, adj);

    for (const auto* k : {&Af, &Ag}) {
      const double scale = std::max(fock::max_abs(*k), 1e-300);
      worst_pres = std::max(worst_pres, fock::symmetry_defect(*k) / scale);
      worst_pres = std::max(worst_pres, fock::divergence_defect(*k) / (scale * in.N));
    }

    fock::FockVector v(in.d, in.n, in.n + 1);
    v.at(in.n) = f;
    v.at(in.n + 1) = g;
    const double skew = std::abs(fock::inner(v, fock::apply_A(v, p)).real()) / fock::norm2(v);
    worst_skew = std::max(worst_skew, skew);
  }
  r.metrics = {{"adjoint_rel", worst_adj}, {"preservation_rel", worst_pres},
               {"skew_real_part_rel", worst_skew}};
  r.passed = failure.empty() && worst_adj <= 1e-11 && worst_pres <= 1e-12 && worst_skew <= 1e-12;
  r.detail = !failure.empty()
                 ? failure
                 : fmt::format("adjoint {:.2e}, symmetric/divergence-free {:.2e}, Re<f,Af> {:.2e}",
                               worst_adj, worst_pres, worst_skew);
  return r;
}

CheckResult check_commutation(std::uint64_t seed) {
  CheckResult r;
  r.name = "commutation";
  double worst = 0.0;
  for (const auto& in : instances()) {
    const auto p = ModelParams::make(in.d, 1.0, in.N, in.n + 1);
    const auto& pts = *ball_points(p);
    const auto f = fock::random_kernel(in.n, in.K, pts, 6, seed);
    const auto g = fock::random_kernel(in.n + 1, in.K, pts, 6, seed + 1);
    for (int axis = 0; axis < in.d; ++axis) {
      const auto a = fock::apply_momentum(axis, fock::apply_Aplus(f, p));
      const auto b = fock::apply_Aplus(fock::apply_momentum(axis, f), p);
      const auto c = fock::apply_momentum(axis, fock::apply_Aminus(g, p));
      const auto e = fock::apply_Aminus(fock::apply_momentum(axis, g), p);
      const double s1 = std::max(fock::max_abs(a), 1e-300);
      const double s2 = std::max(fock::max_abs(c), 1e-300);
      worst = std::max(worst, fock::max_abs(a - b) / s1);
      worst = std::max(worst, fock::max_abs(c - e) / s2);
    }
  }
  r.metrics = {{"commutator_rel", worst}};
  r.passed = worst <= 1e-12;
  r.detail = fmt::format("momentum commutator {:.2e}", worst);
  return r;
}

CheckResult check_g_ode() {
  using boost::math::quadrature::gauss_kronrod;
  CheckResult r;
  r.name = "g-ode";
  double worst = std::abs(diffusivity::replacement_G(0.0));
  bool increasing = true;
  double prev = -1.0;
  for (double x : {0.1, 1.0, 10.0, 100.0, 1e3, 1e4, 1e5}) {
    const double integral = gauss_kronrod<double, 61>::integrate(
        [](double t) { return 1.0 / (1.0 + diffusivity::replacement_G(t)); }, 0.0, x, 15, 1e-14);
    const double G = diffusivity::replacement_G(x);
    worst = std::max(worst, std::abs(G - integral / (32.0 * kPi)) / std::max(G, 1e-300));
    increasing = increasing && G > prev;
    prev = G;
  }
  r.metrics = {{"ode_rel", worst}, {"increasing", increasing}};
  r.passed = worst <= 1e-10 && increasing;
  r.detail = fmt::format("G(x) vs integral form {:.2e}, increasing {}", worst, increasing);
  return r;
}

CheckResult check_replacement(const std::vector<double>& Ns, std::uint64_t seed) {
  CheckResult r;
  r.name = "replacement";
  if (Ns.size() < 2) throw InvalidInput("replacement check needs at least two N values");
  std::vector<double> C;
  Json per_N = Json::array();
  for (double N : Ns) {
    const auto p = ModelParams::make(2, 1.0, N);
    rng::Stream s(seed, 0);
    const int rad = int(N / 2);
    auto draw = [&] {
      for (;;) {
        const int x = int(s.uniform() * (2 * rad + 1)) - rad;
        const int y = int(s.uniform() * (2 * rad + 1)) - rad;
        const WaveVector k(std::min(x, rad), std::min(y, rad));
        if (!k.is_zero() && k.norm() <= N / 2) return k;
      }
    };
    const std::vector<WaveVector> fixed{WaveVector(1, 0), WaveVector(1, 1), WaveVector(3, -2)};
    double worst = 0.0;
    for (int i = 0; i < 40; ++i) {
      const WaveVector k = i < 3 ? fixed[std::size_t(i)] : draw();
      const WaveVector k2 = i < 3 ? fixed[std::size_t((i + 1) % 3)] : draw();
      worst = std::max(worst, diffusivity::replacement_deviation({k}, p));
      worst = std::max(worst, diffusivity::replacement_deviation({k, k2}, p));
    }
    const double c = worst / (p.lambda_N() * p.lambda_N());
    C.push_back(c);
    per_N.push_back({{"N", N}, {"C", c}});
  }
  const auto [lo, hi] = std::minmax_element(C.begin(), C.end());
  const double ratio = *hi / *lo;
  r.metrics = {{"per_N", per_N}, {"max_over_min", ratio}};
  r.passed = ratio < 2.0;
  r.detail = fmt::format("fitted C spread max/min = {:.4f} over {} values of N", ratio, C.size());
  return r;
}

CheckResult check_corollary(std::uint64_t mc_samples, std::uint64_t seed, int partitions) {
  CheckResult r;
  r.name = "corollary";
  std::vector<double> lambdas;
  for (int i = 1; i <= 40; ++i) lambdas.push_back(0.1 * i);
  diffusivity::MonteCarloOptions opts;
  opts.accepted_samples = mc_samples;
  opts.seed = seed;
  opts.partitions = partitions;
  opts.threads = partitions;
  const auto mc = diffusivity::f2_d3(opts);
  const auto rep = diffusivity::corollary_check(lambdas, mc.value, mc.stderr_);
  r.metrics = {{"f2", mc.value},
               {"f2_stderr", mc.stderr_},
               {"f1_squared", rep.f1_squared},
               {"gap_in_stderr", rep.gap_in_stderr},
               {"first_order_below_nu", rep.first_order_below_nu}};
  r.passed = rep.first_order_below_nu && rep.second_order_gap;
  r.detail = rep.failure.empty()
                 ? fmt::format("first order below nu_eff-1 on 40 points; f2 = {:.6g} +- {:.2g} is "
                               "{:.0f} stderr from f1^2",
                               mc.value, mc.stderr_, rep.gap_in_stderr)
                 : rep.failure;
  return r;
}

CheckResult check_decoupling(const std::vector<double>& Ns) {
  CheckResult r;
  r.name = "decoupling";
  if (Ns.size() < 2) throw InvalidInput("decoupling check needs at least two N values");
  for (std::size_t i = 1; i < Ns.size(); ++i) {
    if (!(Ns[i] > Ns[i - 1])) throw InvalidInput("decoupling N values must increase");
  }
  const WaveVector generic(1, 2, 3);
  std::vector<double> off;
  double cross = 0.0;
  Json per_N = Json::array();
  ModelParams last;
  for (double N : Ns) {
    const auto p = ModelParams::make(3, 1.0, N).with_norm(MollifierNorm::euclidean);
    const double o = std::abs(diffusivity::path_sum(2, p, generic, 1, generic, 2)) /
                     std::abs(diffusivity::path_sum(2, p, generic, 1, generic, 1));
    cross = std::max(cross,
                     std::abs(diffusivity::path_sum(2, p, WaveVector(1, 0, 0), 1,
                                                    WaveVector(0, 1, 0), 1)));
    off.push_back(o);
    per_N.push_back({{"N", N}, {"off_over_diag", o}});
    last = p;
  }
  bool shrinking = true;
  for (std::size_t i = 1; i < off.size(); ++i) shrinking = shrinking && off[i] < off[i - 1];

  // Diagonal agreement at the largest N inside groups of equal |k|.
  const std::vector<std::vector<WaveVector>> groups{
      {WaveVector(1, 0, 0), WaveVector(0, 1, 0), WaveVector(0, 0, 1)},
      {WaveVector(3, 0, 0), WaveVector(2, 2, 1), WaveVector(1, 2, 2)}};
  double spread = 0.0;
  for (const auto& g : groups) {
    std::vector<double> v;
    for (const auto& k : g) {
      for (int t = 1; t <= 2; ++t) v.push_back(diffusivity::path_sum(2, last, k, t, k, t).real());
    }
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    spread = std::max(spread, (*hi - *lo) / std::abs(*lo));
  }

  const std::size_t m = Ns.size();
  const auto p1 = ModelParams::make(3, 1.0, Ns[m - 2]).with_norm(MollifierNorm::euclidean);
  const double v1 = diffusivity::path_sum(2, p1, WaveVector(1, 0, 0), 1, WaveVector(1, 0, 0), 1).real();
  const double v2 = diffusivity::path_sum(2, last, WaveVector(1, 0, 0), 1, WaveVector(1, 0, 0), 1).real();
  const double limit = diffusivity::richardson(Ns[m - 2], v1, Ns[m - 1], v2);
  const double limit_rel = std::abs(limit + diffusivity::kF1ClosedForm) / diffusivity::kF1ClosedForm;

  r.metrics = {{"per_N", per_N},
               {"cross_momentum", cross},
               {"diagonal_spread", spread},
               {"extrapolated", limit},
               {"extrapolated_rel", limit_rel}};
  r.passed = shrinking && cross <= 1e-14 && spread <= 1e-2 && limit_rel <= 0.02;
  r.detail = fmt::format(
      "off-diagonal shrinking {}, diagonal spread {:.2e}, extrapolated {:.6f} ({:.2e} from "
      "-7/(30 pi))",
      shrinking, spread, limit, limit_rel);
  return r;
}

}  // namespace llns::cli
