// Copyright 2026 The llns authors
// SPDX-License-Identifier: Apache-2.0
#include "cli/commands.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <algorithm>
#include <map>
#include <set>

#include "cli/verify_suite.hpp"
#include "llns/diffusivity.hpp"
#include "llns/error.hpp"
#include "llns/format.hpp"
#include "llns/report.hpp"
#include "llns/simulator.hpp"
#include "llns/snapshot.hpp"

namespace llns::cli {
namespace fs = std::filesystem;

namespace {

std::ostream& log_of(const RunContext& ctx) {
  static std::ostream silent(nullptr);
  return ctx.log ? *ctx.log : silent;
}

void write_text(const fs::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw ComputationError("cannot write " + file.string());
  out << text;
  if (!out) throw ComputationError("write failed: " + file.string());
}

WaveVector wave_vector(int d, const Json& j, const std::string& field) {
  if (!j.is_array() || int(j.size()) != d) {
    throw InvalidInput(fmt::format("{}: expected {} integer components", field, d));
  }
  std::array<int, 3> c{0, 0, 0};
  for (int i = 0; i < d; ++i) {
    if (!j[std::size_t(i)].is_number_integer()) {
      throw InvalidInput(field + ": components must be integers");
    }
    c[std::size_t(i)] = j[std::size_t(i)].get<int>();
  }
  const auto k = WaveVector::of(d, c);
  if (k.is_zero()) throw InvalidInput(field + ": wavevector must be nonzero");
  return k;
}

MollifierNorm norm_for(int d, const std::string& name) {
  if (name == "default") return ModelParams::make(d, 1.0, d == 2 ? 2.0 : 1.5).norm;
  return parse_norm(name);
}

std::string tag(double v) { return shortest(v); }

// Lattice f1 with the raised kernel cached as a snapshot.
double cached_f1_lattice(const ModelParams& p, const WaveVector& k, const RunContext& ctx) {
  const ModelParams q = p.with_lambda(1.0);
  if (!ctx.cache_dir) {
    return diffusivity::f1_lattice(q, k);
  }
  const std::string key = fmt::format("d={};N={};norm={};k={};n=2;chain=T+ sigma(k,1)", q.dim,
                                      tag(q.N), to_string(q.norm), k.str());
  const fs::path file = *ctx.cache_dir / ("kernel-" + sha256_string(key).substr(0, 24) + ".csv");
  if (fs::exists(file)) {
    std::ifstream in(file);
    try {
      const auto snap = fock::read_snapshot(in);
      if (snap.meta.N == q.N) return fock::norm2(snap.kernel);
    } catch (const InvalidInput& e) {
      log_of(ctx) << "ignoring unreadable cache entry " << file << ": " << e.what() << '\n';
    }
  }
  const auto raised = fock::apply_T(fock::Sign::plus, fock::sigma_kernel(k, 1), q);
  fs::create_directories(*ctx.cache_dir);
  const fs::path tmp = file.string() + ".tmp";
  {
    std::ofstream out(tmp);
    fock::write_snapshot(out, raised, {q.N, q.lambda});
  }
  fs::rename(tmp, file);
  return fock::norm2(raised);
}

}  // namespace

CommandResult run_coeff(const Json& P, const RunContext& ctx) {
  const int d = P.at("d").get<int>();
  if (d != 2 && d != 3) throw InvalidInput("--d must be 2 or 3");
  const auto lambdas = P.at("lambda").get<std::vector<double>>();
  for (double l : lambdas) {
    if (!(l >= 0.0) || !std::isfinite(l)) throw InvalidInput("--lambda values must be >= 0");
  }
  const MollifierNorm norm = parse_norm(P.at("norm").get<std::string>());
  const WaveVector k = wave_vector(d, P.at("k"), "--k");
  ConstantsReport rep;

  if (d == 2) {
    for (double l : lambdas) {
      rep.add({fmt::format("D[lambda={}]", tag(l)), diffusivity::d2_effective_D(l),
               Method::closed_form, 1e-15, Uncertainty::tolerance,
               "d=2 effective diffusivity, closed form", {{"lambda", l}}});
    }
  } else {
    const double f1 = diffusivity::kF1ClosedForm;
    if (P.at("f1").get<bool>()) {
      rep.add({"f1.closed-form", f1, Method::closed_form, 1e-16, Uncertainty::tolerance,
               "first-order coefficient, 7/(30 pi)", {}});
      const auto qe = diffusivity::f1_sphere_quadrature(MollifierNorm::euclidean);
      rep.add({"f1.quadrature", qe.value, Method::quadrature, qe.error, Uncertainty::tolerance,
               "first-order coefficient, spherical integral, Euclidean mollifier", {}});
      const auto qs = diffusivity::f1_sphere_quadrature(MollifierNorm::sup, {1, 0, 0},
                                                        {0, 1, 0}, 1e-9);
      rep.add({"f1.quadrature.sup", qs.value, Method::quadrature, qs.error,
               Uncertainty::tolerance,
               "first-order coefficient, spherical integral, sup-norm mollifier", {}});
      const auto Ns = P.at("f1_lattice").get<std::vector<double>>();
      std::vector<double> vals;
      for (double N : Ns) {
        const auto p = ModelParams::make(3, 1.0, N).with_norm(norm);
        log_of(ctx) << "f1 lattice sum at N=" << N << '\n';
        vals.push_back(cached_f1_lattice(p, k, ctx));
        rep.add({fmt::format("f1.lattice[N={}]", tag(N)), vals.back(), Method::lattice, 1e-12,
                 Uncertainty::tolerance, "first-order coefficient, finite-N lattice sum",
                 {{"N", N}}});
      }
      if (vals.size() >= 2) {
        const std::size_t m = vals.size();
        const double ex = diffusivity::richardson(Ns[m - 2], vals[m - 2], Ns[m - 1], vals[m - 1]);
        rep.add({"f1.lattice.extrapolated", ex, Method::lattice, std::abs(ex - vals[m - 1]),
                 Uncertainty::tolerance, "first-order coefficient, 1/N extrapolation",
                 {{"N1", Ns[m - 2]}, {"N2", Ns[m - 1]}}});
      }
    }
    if (P.at("f2").get<bool>()) {
      diffusivity::MonteCarloOptions o;
      o.accepted_samples = P.at("mc_samples").get<std::uint64_t>();
      o.seed = P.at("seed").get<std::uint64_t>();
      o.partitions = P.at("partitions").get<int>();
      o.threads = o.partitions;
      o.batches = P.at("batches").get<int>();
      o.norm = norm;
      log_of(ctx) << "f2 Monte Carlo, " << o.accepted_samples << " accepted samples\n";
      const auto mc = diffusivity::f2_d3(o);
      rep.add({"f2.monte-carlo", mc.value, Method::monte_carlo, mc.stderr_, Uncertainty::stderr_,
               "second-order coefficient, six-dimensional integral",
               {{"accepted", double(mc.accepted)},
                {"proposed", double(mc.proposed)},
                {"seed", double(o.seed)},
                {"partitions", double(o.partitions)}}});
    }
    for (double l : lambdas) {
      rep.add({fmt::format("first-order[lambda={}]", tag(l)), f1 * l * l, Method::closed_form,
               1e-16, Uncertainty::tolerance, "first-order diffusivity 7 lambda^2/(30 pi)",
               {{"lambda", l}}});
      rep.add({fmt::format("D_rep[lambda={}]", tag(l)), diffusivity::D_rep(f1, l),
               Method::closed_form, 1e-16, Uncertainty::tolerance,
               "replacement fixed point x(1+x) = c lambda^2", {{"lambda", l}}});
      rep.add({fmt::format("nu_eff-1[lambda={}]", tag(l)), diffusivity::nu_eff(l) - 1.0,
               Method::closed_form, 1e-16, Uncertainty::tolerance,
               "conjectured effective viscosity minus one", {{"lambda", l}}});
    }
  }

  if (!P.at("N").is_null() && !P.at("n").is_null()) {
    const double N = P.at("N").get<double>();
    const int n = P.at("n").get<int>();
    for (double l : lambdas) {
      const auto p = ModelParams::make(d, l, N, n).with_norm(norm);
      log_of(ctx) << "resolvent at " << p.describe() << '\n';
      const auto D = diffusivity::D_truncated(p, k);
      rep.add({fmt::format("D^n[N={},n={},lambda={}]", tag(N), n, tag(l)), D.value,
               Method::resolvent, std::abs(D.value) * D.residual, Uncertainty::tolerance,
               "truncated resolvent quadratic form",
               {{"N", N}, {"n", double(n)}, {"lambda", l}, {"iterations", double(D.iterations)}}});
    }
  }

  write_text(ctx.out / "constants.json", rep.to_json());
  write_text(ctx.out / "constants.txt", rep.to_table());
  log_of(ctx) << rep.to_table();
  return {0, {"constants.json", "constants.txt"}};
}

CommandResult run_verify(const Json& P, const RunContext& ctx) {
  const auto only = P.at("only").get<std::vector<std::string>>();
  const std::uint64_t seed = P.at("seed").get<std::uint64_t>();
  for (const auto& name : only) {
    if (std::find(check_names().begin(), check_names().end(), name) == check_names().end()) {
      throw InvalidInput("unknown check '" + name + "'");
    }
  }
  auto selected = [&](const std::string& name) {
    return only.empty() || std::find(only.begin(), only.end(), name) != only.end();
  };
  std::vector<CheckResult> results;
  auto run = [&](const std::string& name, auto&& fn) {
    if (!selected(name)) return;
    log_of(ctx) << "running " << name << "\n";
    results.push_back(fn());
    const auto& r = results.back();
    log_of(ctx) << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
  };
  const auto NR = P.at("N_replacement").get<std::vector<double>>();
  const auto ND = P.at("N_decoupling").get<std::vector<double>>();
  if (selected("replacement")) {
    for (double N : NR) ModelParams::make(2, 1.0, N).validate();
  }
  if (selected("decoupling")) {
    for (double N : ND) ModelParams::make(3, 1.0, N).validate();
  }
  run("adjointness", [&] { return check_adjointness(seed); });
  run("commutation", [&] { return check_commutation(seed); });
  run("g-ode", [&] { return check_g_ode(); });
  run("replacement", [&] { return check_replacement(NR, seed); });
  run("corollary", [&] {
    return check_corollary(P.at("mc_samples").get<std::uint64_t>(), seed,
                           P.at("partitions").get<int>());
  });
  run("decoupling", [&] { return check_decoupling(ND); });

  Json out;
  out["schema"] = "llns.verify";
  out["version"] = 1;
  bool all = true;
  Json arr = Json::array();
  for (const auto& r : results) {
    all = all && r.passed;
    arr.push_back({{"name", r.name}, {"passed", r.passed}, {"detail", r.detail},
                   {"metrics", r.metrics}});
  }
  out["checks"] = arr;
  out["passed"] = all;
  write_text(ctx.out / "verify.json", out.dump(2) + "\n");
  return {all ? 0 : 1, {"verify.json"}};
}

Json resolve_simulate_config(const Json& c) {
  if (!c.is_object()) throw InvalidInput("config: expected a JSON object");
  static const std::set<std::string> known{"d",      "lambda",  "N",           "T",
                                           "ensemble", "seed",  "dt",          "stride",
                                           "threads", "norm",   "convolution", "observed",
                                           "estimate", "window"};
  for (const auto& [key, v] : c.items()) {
    if (!known.count(key)) throw InvalidInput("config: unknown field '" + key + "'");
  }
  for (const char* field : {"d", "lambda", "N", "T", "ensemble", "seed"}) {
    if (!c.contains(field)) {
      throw InvalidInput(std::string("config: missing required field '") + field + "'");
    }
  }
  auto number = [&](const char* field) {
    if (!c.at(field).is_number()) throw InvalidInput(std::string("config: field '") + field + "' must be a number");
    return c.at(field).get<double>();
  };
  auto integer = [&](const char* field) {
    if (!c.at(field).is_number_integer()) {
      throw InvalidInput(std::string("config: field '") + field + "' must be an integer");
    }
    return c.at(field).get<long long>();
  };
  auto text = [&](const char* field) {
    if (!c.at(field).is_string()) throw InvalidInput(std::string("config: field '") + field + "' must be a string");
    return c.at(field).get<std::string>();
  };
  Json r;
  r["d"] = integer("d");
  r["lambda"] = number("lambda");
  r["N"] = number("N");
  r["T"] = number("T");
  r["ensemble"] = integer("ensemble");
  if (integer("seed") < 0) throw InvalidInput("config: field 'seed' must be >= 0");
  r["seed"] = c.at("seed").get<std::uint64_t>();
  r["dt"] = c.contains("dt") ? number("dt") : 0.0;
  r["stride"] = c.contains("stride") ? integer("stride") : 0;
  r["threads"] = c.contains("threads") ? integer("threads") : 1;
  r["norm"] = c.contains("norm") ? text("norm") : std::string("default");
  r["convolution"] = c.contains("convolution") ? text("convolution") : std::string("automatic");
  r["estimate"] = c.contains("estimate") ? text("estimate") : std::string("green-kubo");
  r["window"] = c.contains("window") ? number("window") : 0.0;
  r["observed"] = c.contains("observed") ? c.at("observed") : Json::array();
  if (!r["observed"].is_array()) throw InvalidInput("config: field 'observed' must be an array");

  const int d = r["d"].get<int>();
  if (d != 2 && d != 3) throw InvalidInput("config: field 'd' must be 2 or 3");
  const std::string norm = r["norm"].get<std::string>();
  if (norm != "default") parse_norm(norm);
  r["norm"] = to_string(norm_for(d, norm));
  sim::parse_convolution(r["convolution"].get<std::string>());
  static const std::set<std::string> estimates{"none", "green-kubo", "autocorr", "both"};
  if (!estimates.count(r["estimate"].get<std::string>())) {
    throw InvalidInput("config: field 'estimate' must be none|green-kubo|autocorr|both");
  }
  if (r["ensemble"].get<long long>() < 1) throw InvalidInput("config: field 'ensemble' must be >= 1");
  if (r["threads"].get<long long>() < 1) throw InvalidInput("config: field 'threads' must be >= 1");
  if (r["stride"].get<long long>() < 0) throw InvalidInput("config: field 'stride' must be >= 0");
  if (!(r["window"].get<double>() >= 0.0)) throw InvalidInput("config: field 'window' must be >= 0");
  for (const auto& k : r["observed"]) wave_vector(d, k, "config: observed");

  // Resolve defaults that depend on the model.
  auto p = ModelParams::make(d, r["lambda"].get<double>(), r["N"].get<double>());
  p.validate();
  if (r["dt"].get<double>() == 0.0) r["dt"] = sim::SimConfig::default_dt(p.N);
  if (r["stride"].get<long long>() == 0) {
    r["stride"] = std::max<long long>(1, std::llround(1e-3 / r["dt"].get<double>()));
  }
  return r;
}

CommandResult run_simulate(const Json& P, const RunContext& ctx) {
  const int d = P.at("d").get<int>();
  sim::SimConfig cfg;
  cfg.model = ModelParams::make(d, P.at("lambda").get<double>(), P.at("N").get<double>())
                  .with_norm(parse_norm(P.at("norm").get<std::string>()));
  cfg.dt = P.at("dt").get<double>();
  cfg.horizon = P.at("T").get<double>();
  cfg.ensemble = P.at("ensemble").get<int>();
  cfg.seed = P.at("seed").get<std::uint64_t>();
  cfg.threads = P.at("threads").get<int>();
  cfg.stride = P.at("stride").get<int>();
  cfg.convolution = sim::parse_convolution(P.at("convolution").get<std::string>());
  for (const auto& k : P.at("observed")) cfg.observed.push_back(wave_vector(d, k, "observed"));
  log_of(ctx) << fmt::format("simulating {} members, {} steps of {:.4g}\n", cfg.ensemble,
                             cfg.steps(), cfg.step_size());
  const auto tr = sim::run(cfg);
  {
    std::ofstream out(ctx.out / "trajectory.csv", std::ios::binary);
    if (!out) throw ComputationError("cannot write trajectory.csv");
    tr.write_csv(out);
  }

  ConstantsReport rep;
  const std::string est = P.at("estimate").get<std::string>();
  const double window = P.at("window").get<double>();
  const double lam = cfg.model.lambda;
  const std::map<std::string, double> base{{"lambda", lam},
                                           {"N", cfg.model.N},
                                           {"ensemble", double(cfg.ensemble)},
                                           {"T", cfg.horizon},
                                           {"dt", cfg.step_size()}};
  auto add = [&](const std::string& name, const sim::Estimate& e, const std::string& anchor) {
    rep.add({name, e.value, Method::simulation, e.stderr_, Uncertainty::stderr_, anchor, base});
    if (lam > 0.0) {
      rep.add({name + "/lambda^2", e.value / (lam * lam), Method::simulation,
               e.stderr_ / (lam * lam), Uncertainty::stderr_, anchor, base});
    }
  };
  if (cfg.ensemble >= 8) {
    if (est == "green-kubo" || est == "both") {
      add("D_hat.green-kubo", sim::estimator_green_kubo_pooled(tr, window),
          "Green-Kubo estimate pooled over observed modes");
      for (const auto& o : tr.observables) {
        add("D_hat.green-kubo[" + o.id() + "]",
            sim::estimator_green_kubo(tr, o.k, o.alpha, window), "Green-Kubo estimate");
      }
    }
    if (est == "autocorr" || est == "both") {
      std::set<std::uint64_t> seen;
      for (const auto& o : tr.observables) {
        if (!seen.insert(pack(o.k)).second) continue;
        add("D_hat.autocorr[k=" + o.k.str() + "]", sim::estimator_mode_autocorr(tr, o.k, 0),
            "mode autocorrelation decay fit");
      }
    }
  } else if (est != "none") {
    throw InvalidInput("estimators need an ensemble of at least 8 members");
  }
  double energy = 0.0;
  for (const auto& m : tr.members) {
    for (double e : m.energy) energy += e;
  }
  energy /= double(tr.members.size() * tr.records());
  rep.add({"mean_mode_energy", energy, Method::simulation, 0.0, Uncertainty::stderr_,
           "invariant measure normalisation", base});
  write_text(ctx.out / "estimators.json", rep.to_json());
  write_text(ctx.out / "estimators.txt", rep.to_table());
  log_of(ctx) << rep.to_table();
  return {0, {"trajectory.csv", "estimators.json", "estimators.txt"}};
}

RunManifest execute(const std::string& command, const Json& params, const RunContext& ctx,
                    int& exit_code) {
  fs::create_directories(ctx.out);
  RunManifest m;
  m.command = command;
  m.params = params;
  m.seed = params.contains("seed") ? params.at("seed").get<std::uint64_t>() : 0;
  m.code_version = code_version();
  m.started_utc = utc_now();
  const auto t0 = std::chrono::steady_clock::now();
  CommandResult res;
  if (command == "coeff") {
    res = run_coeff(params, ctx);
  } else if (command == "verify") {
    res = run_verify(params, ctx);
  } else if (command == "simulate") {
    res = run_simulate(params, ctx);
  } else {
    throw InvalidInput("unknown command '" + command + "'");
  }
  m.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  for (const auto& f : res.outputs) m.outputs[f] = sha256_file(ctx.out / f);
  m.save(ctx.out / "manifest.json");
  exit_code = res.exit_code;
  return m;
}

}  // namespace llns::cli
