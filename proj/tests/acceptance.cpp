// Copyright 2026 The llns authors
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: one PASS/FAIL line per criterion.

#include <fmt/format.h>

#include <CLI11.hpp>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <set>

#include "cli/commands.hpp"
#include "cli/verify_suite.hpp"
#include "llns/diffusivity.hpp"
#include "llns/simulator.hpp"
#include "llns/statistics.hpp"
#include "oracle/dense.hpp"

using namespace llns;
namespace fs = std::filesystem;
namespace df = llns::diffusivity;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

struct Settings {
  std::uint64_t mc_samples = 10'000'000;
  int ensemble = 64;
  std::uint64_t seed = 20260101;
  fs::path scratch;
};

std::string verdict(bool ok) { return ok ? "ok" : "NO"; }

Outcome from_check(const cli::CheckResult& r) { return {r.passed, r.detail}; }

Outcome d2_closed_form() {
  double worst_closed = 0.0, worst_G = 0.0;
  for (int i = 1; i <= 100; ++i) {
    const double l = 0.1 * i;
    const double D = df::d2_effective_D(l);
    worst_closed = std::max(worst_closed, std::abs(D - (std::sqrt(l * l / (8.0 * kPi) + 1.0) - 1.0)));
    worst_G = std::max(worst_G, std::abs(D - df::replacement_G(2.0 * l * l)));
  }
  return {worst_closed <= 1e-12 && worst_G <= 1e-12,
          fmt::format("100 couplings in [0.1,10]: max dev closed form {:.1e}, via G {:.1e}",
                      worst_closed, worst_G)};
}

Outcome f1_routes() {
  const auto q = df::f1_sphere_quadrature(MollifierNorm::euclidean);
  const double f1 = df::kF1ClosedForm;
  double v[2];
  const double Ns[2] = {24.5, 48.5};
  for (int i = 0; i < 2; ++i) {
    const auto p = ModelParams::make(3, 1.0, Ns[i]).with_norm(MollifierNorm::euclidean);
    v[i] = df::f1_lattice(p, WaveVector(1, 0, 0));
  }
  const double ex = df::richardson(Ns[0], v[0], Ns[1], v[1]);
  const double qdev = std::abs(q.value - f1), ldev = std::abs(ex / f1 - 1.0);
  return {qdev <= 1e-6 && ldev <= 5e-3,
          fmt::format("quadrature {:.9f} (dev {:.1e}); lattice {:.6f}, {:.6f} -> {:.6f} ({:.2f}%)",
                      q.value, qdev, v[0], v[1], ex, 100.0 * ldev)};
}

std::optional<df::MonteCarloResult> f2_cache;

const df::MonteCarloResult& f2_value(const Settings& s) {
  if (!f2_cache) {
    df::MonteCarloOptions o;
    o.accepted_samples = s.mc_samples;
    o.seed = s.seed;
    f2_cache = df::f2_d3(o);
  }
  return *f2_cache;
}

Outcome f2_monte_carlo(const Settings& s) {
  const auto& mc = f2_value(s);
  const double want = df::f2_quoted();
  const double dev = std::abs(mc.value / want - 1.0);
  const double rel_err = mc.stderr_ / mc.value;
  return {dev <= 0.02 && rel_err <= 0.01,
          fmt::format("f2 = {:.7f} +- {:.1e} ({} accepted, stderr {:.2f}%), quoted {:.7f}, off by {:.2f}%",
                      mc.value, mc.stderr_, mc.accepted, 100.0 * rel_err, want, 100.0 * dev)};
}

Outcome corollary(const Settings& s) {
  const auto& mc = f2_value(s);
  std::vector<double> grid;
  for (int i = 1; i <= 40; ++i) grid.push_back(0.1 * i);
  const auto rep = df::corollary_check(grid, mc.value, mc.stderr_);
  return {rep.first_order_below_nu && rep.second_order_gap,
          fmt::format("(i) {} on 40 points; (ii) |f2 - f1^2| = {:.0f} stderr (f2 {:.6f}, f1^2 {:.7f})",
                      verdict(rep.first_order_below_nu), rep.gap_in_stderr, mc.value, rep.f1_squared)};
}

Outcome operator_suite(const Settings& s) {
  const auto adj = cli::check_adjointness(s.seed);
  const auto com = cli::check_commutation(s.seed);
  double worst = 0.0;
  for (auto [d, N, norm] : {std::tuple{3, 1.5, MollifierNorm::sup},
                            std::tuple{3, 1.5, MollifierNorm::euclidean},
                            std::tuple{2, 3.0, MollifierNorm::euclidean}}) {
    const auto F = oracle::fiber(d, N, norm);
    for (int n = 1; n <= 2; ++n) worst = std::max(worst, oracle::aplus_deviation(F, n, 3 + n));
    for (int n = 2; n <= 3; ++n) worst = std::max(worst, oracle::aminus_deviation(F, n, 17 + n));
  }
  const bool oracle_ok = worst <= 1e-13;
  return {adj.passed && com.passed && oracle_ok,
          fmt::format("{}; {}; direct formulas max rel dev {:.1e}", adj.detail, com.detail, worst)};
}

Outcome resolvent_route() {
  const WaveVector K(1, 0, 0);
  const auto p = ModelParams::make(3, 0.1, 8.5, 3).with_norm(MollifierNorm::euclidean);
  const auto D = df::D_truncated(p, K);
  const double f1 = df::f1_lattice(p, K);
  const double ratio = D.value / (p.lambda * p.lambda) / f1;

  const auto q = ModelParams::make(3, 2.0, 1.5, 3).with_norm(MollifierNorm::euclidean);
  const oracle::DenseResolvent dense(q, K);
  fock::SolverOptions tight;
  tight.tolerance = 1e-12;
  const auto lib = df::D_truncated(q, K, basis::FrameRule::first_axis, tight);
  const double dense_dev = std::abs(lib.value - dense.D) / std::abs(dense.D);
  return {std::abs(ratio - 1.0) <= 0.10 && dense_dev <= 1e-8,
          fmt::format("D^3/lambda^2 = {:.6f} vs lattice f1 {:.6f} at N=8.5 ({:+.3f}%, "
                      "{} iterations; 7/(30 pi) = {:.6f}); dense oracle D = {:.10f}, rel dev {:.1e}",
                      D.value / 0.01, f1, 100.0 * (ratio - 1.0), D.iterations, df::kF1ClosedForm,
                      dense.D, dense_dev)};
}

// lambda = 0 innovations of the exponential step are exact standard normals.
std::pair<bool, std::string> ou_laws() {
  sim::SimConfig cfg;
  cfg.model = ModelParams::make(3, 0.0, 2.5);
  cfg.dt = 1e-3;
  cfg.seed = 404;
  auto s = sim::sample_invariant_state(cfg, cfg.seed);
  sim::Nonlinearity nl(s.layout, sim::Convolution::automatic);
  const std::vector<std::size_t> probe{0, 9, 23, 41, 60};
  std::vector<std::vector<double>> z(probe.size() * 2);
  std::vector<double> initial;
  for (const auto& c : s.u) {
    for (const auto& x : c) {
      initial.push_back(std::sqrt(2.0) * x.real());
      initial.push_back(std::sqrt(2.0) * x.imag());
    }
  }
  for (std::uint64_t n = 0; n < 1000; ++n) {
    const auto before = s.u;
    sim::step(s, cfg, nl, 0, n);
    for (std::size_t p = 0; p < probe.size(); ++p) {
      const std::size_t i = probe[p];
      const double mu = s.layout->rate(i);
      const double spread = std::sqrt(-std::expm1(-2.0 * mu * cfg.dt));
      for (std::size_t a = 0; a < 2; ++a) {
        const cplx e = (s.u[i][a] - std::exp(-mu * cfg.dt) * before[i][a]) / spread;
        z[2 * p + a].push_back(std::sqrt(2.0) * e.real());
        z[2 * p + a].push_back(std::sqrt(2.0) * e.imag());
      }
    }
  }
  z.push_back(initial);
  const double level = 0.01 / double(z.size());
  double pmin = 1.0;
  for (auto& v : z) pmin = std::min(pmin, stats::ks_test_standard_normal(v).p_value);
  return {pmin > level, fmt::format("KS min p {:.3f} over {} series (level {:.1e})", pmin, z.size(), level)};
}

Outcome simulator_physics(const Settings& s) {
  const auto [ou_ok, ou_detail] = ou_laws();

  sim::SimConfig cfg;
  cfg.model = ModelParams::make(3, 0.5, 4.5);
  cfg.dt = 2.5e-4;
  cfg.horizon = 1.0;
  cfg.stride = 4;
  cfg.ensemble = s.ensemble;
  cfg.seed = s.seed;

  // energy orthogonality along one trajectory, both convolution paths
  double worst = 0.0;
  {
    auto st = sim::sample_invariant_state(cfg, cfg.seed, 999);
    sim::Nonlinearity nl(st.layout, sim::Convolution::pseudospectral);
    for (std::uint64_t n = 0; n < 200; ++n) {
      const auto B = sim::step(st, cfg, nl, 999, n);
      if (n % 20 != 0) continue;
      for (auto method : {sim::Convolution::pseudospectral, sim::Convolution::direct}) {
        auto pre = st;
        const auto Bm = sim::nonlinearity_B(pre, method);
        double bn = 0.0, un = 0.0;
        for (std::size_t i = 0; i < Bm.size(); ++i) {
          for (const auto& x : Bm[i]) bn += std::norm(x);
          un += std::norm(pre.u[i][0]) + std::norm(pre.u[i][1]);
        }
        worst = std::max(worst, std::abs(sim::energy_pairing(pre, Bm)) / std::sqrt(bn * un));
      }
      (void)B;
    }
  }
  const bool energy_ok = worst <= 1e-12;

  const auto t = sim::run(cfg);
  std::vector<double> x, y;
  for (std::size_t r = 0; r < t.records(); ++r) {
    double e = 0.0;
    for (const auto& m : t.members) e += m.energy[r];
    x.push_back(t.times[r]);
    y.push_back(e / double(t.members.size()));
  }
  const auto fit = stats::fit_line(x, y);
  const double tstat = std::abs(fit.slope) / fit.slope_stderr;
  const bool drift_ok = tstat < stats::t_critical(0.99, double(x.size() - 2));

  const auto gk = sim::estimator_green_kubo_pooled(t);
  const double l2 = cfg.model.lambda * cfg.model.lambda;
  const double dev = gk.value / l2 / df::kF1ClosedForm - 1.0;
  const bool gk_ok = std::abs(dev) <= 0.30;
  const double lattice = df::f1_lattice(cfg.model, WaveVector(1, 0, 0));

  return {ou_ok && energy_ok && drift_ok && gk_ok,
          fmt::format("{} [{}]; energy pairing max rel {:.1e} [{}]; drift |t| = {:.2f} [{}]; "
                      "Green-Kubo D/lambda^2 = {:.4f} +- {:.4f} ({:+.1f}% from 7/(30 pi), {} members; "
                      "lattice f1 at this N {:.4f}) [{}]",
                      ou_detail, verdict(ou_ok), worst, verdict(energy_ok), tstat, verdict(drift_ok),
                      gk.value / l2, gk.stderr_ / l2, 100.0 * dev, gk.samples, lattice, verdict(gk_ok))};
}

Outcome determinism(const Settings& s) {
  std::vector<std::string> notes;
  bool ok = true;
  auto twice = [&](const std::string& cmd, const cli::Json& params) {
    std::map<std::string, std::string> first;
    for (int rep = 0; rep < 2; ++rep) {
      const auto dir = s.scratch / fmt::format("{}-{}", cmd, rep);
      fs::remove_all(dir);
      fs::create_directories(dir);
      cli::RunContext ctx{dir, std::nullopt, nullptr};
      int code = -1;
      const auto m = cli::execute(cmd, params, ctx, code);
      if (code != 0) ok = false;
      if (rep == 0) first = m.outputs;
      else if (m.outputs != first) ok = false;
    }
    notes.push_back(fmt::format("{}: {} outputs", cmd, first.size()));
  };
  cli::Json sim_params = cli::resolve_simulate_config(
      {{"d", 3}, {"lambda", 0.5}, {"N", 3.5}, {"T", 0.02}, {"ensemble", 8}, {"seed", 5},
       {"threads", 2}, {"estimate", "both"}});
  twice("simulate", sim_params);
  const cli::Json coeff_params{{"d", 3},          {"lambda", cli::Json::array({0.5, 1.0})},
                               {"N", nullptr},    {"n", nullptr},
                               {"k", {1, 0, 0}},  {"norm", "sup"},
                               {"f1", false},     {"f1_lattice", cli::Json::array()},
                               {"f2", true},      {"mc_samples", 200000},
                               {"batches", 50},   {"seed", 11},
                               {"partitions", 3}};
  twice("coeff", coeff_params);

  df::MonteCarloOptions o;
  o.accepted_samples = 200000;
  o.partitions = 4;
  o.threads = 1;
  const auto a = df::f2_d3(o);
  o.threads = 4;
  const auto b = df::f2_d3(o);
  const bool mc_ok = a.value == b.value && a.stderr_ == b.stderr_;
  ok = ok && mc_ok;
  return {ok, fmt::format("{}; {}; MC with 4 partitions on 1 vs 4 threads {}", notes[0], notes[1],
                          mc_ok ? "bitwise equal" : "DIFFER")};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"llns acceptance suite"};
  Settings settings;
  std::vector<int> only;
  std::vector<int> tolerated;
  std::string report_path;
  app.add_option("--only", only, "criteria to run")->delimiter(',');
  app.add_option("--mc-samples", settings.mc_samples, "accepted samples for the second coefficient");
  app.add_option("--ensemble", settings.ensemble, "Green-Kubo ensemble size");
  app.add_option("--tolerate", tolerated,
                 "criteria whose FAIL does not change the exit status (still printed as FAIL)")
      ->delimiter(',');
  app.add_option("--report", report_path, "also write the PASS/FAIL lines to this file");
  CLI11_PARSE(app, argc, argv);
  settings.scratch = fs::temp_directory_path() / fmt::format("llns-acceptance-{}", ::getpid());

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"d=2 closed form", [] { return d2_closed_form(); }},
      {"replacement bound", [&] { return from_check(cli::check_replacement({64, 128, 256, 512}, settings.seed)); }},
      {"f1 quadrature and lattice", [] { return f1_routes(); }},
      {"f2 Monte Carlo", [&] { return f2_monte_carlo(settings); }},
      {"corollary", [&] { return corollary(settings); }},
      {"operator algebra", [&] { return operator_suite(settings); }},
      {"decoupling", [] { return from_check(cli::check_decoupling({4.5, 8.5, 16.5})); }},
      {"resolvent route", [] { return resolvent_route(); }},
      {"simulator physics", [&] { return simulator_physics(settings); }},
      {"determinism", [&] { return determinism(settings); }},
  };
  const std::set<int> run_set(only.begin(), only.end());
  const std::set<int> tolerate_set(tolerated.begin(), tolerated.end());
  std::ofstream report;
  if (!report_path.empty()) report.open(report_path);
  auto emit = [&](const std::string& line) {
    std::cout << line << std::endl;
    if (report) report << line << std::endl;
  };
  int failed = 0, tolerated_failures = 0, passed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = int(i) + 1;
    if (!run_set.empty() && !run_set.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    emit(fmt::format("[{:2}] {} {:<26} {:7.1f}s  {}", id, o.passed ? "PASS" : "FAIL",
                     criteria[i].first, secs, o.detail));
    if (o.passed) ++passed;
    else if (tolerate_set.count(id)) ++tolerated_failures;
    else ++failed;
  }
  fs::remove_all(settings.scratch);
  emit(fmt::format("summary: {} passed, {} failed ({} tolerated)", passed,
                   failed + tolerated_failures, tolerated_failures));
  return failed == 0 ? 0 : 1;
}
