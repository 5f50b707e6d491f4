// Copyright 2026 The llns authors
// SPDX-License-Identifier: Apache-2.0
#include <fmt/format.h>

#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cli/commands.hpp"
#include "llns/error.hpp"
#include "llns/model_params.hpp"

namespace fs = std::filesystem;
using llns::InvalidInput;
using llns::cli::Json;

namespace {

fs::path default_out(const std::string& command) {
  if (const char* env = std::getenv("LLNS_OUTPUT_DIR"); env && *env) return fs::path(env) / command;
  return fs::path("llns-out") / command;
}

std::uint64_t exact_count(double v, const char* flag) {
  if (!(v >= 1.0) || v > 1e15 || std::floor(v) != v) {
    throw InvalidInput(fmt::format("{} must be a positive integer", flag));
  }
  return std::uint64_t(v);
}

std::vector<int> parse_ints(const std::string& s, const char* flag) {
  std::vector<int> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InvalidInput(fmt::format("{}: '{}' is not an integer list", flag, s));
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"llns: effective diffusivity constants, verification and simulation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", llns::cli::code_version());

  std::string out_dir, cache_dir;
  bool quiet = false;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--out", out_dir, "output directory (default $LLNS_OUTPUT_DIR/<command>)");
    sub->add_flag("--quiet", quiet, "no progress output");
  };

  // coeff
  auto* coeff = app.add_subcommand("coeff", "tabulate diffusivity constants");
  int c_d = 3;
  std::vector<double> c_lambda{1.0};
  double c_N = 0.0, c_mc = 1e7;
  int c_n = 0, c_threads = 1, c_batches = 100;
  std::string c_k, c_norm = "default";
  bool c_f1 = false, c_f2 = false;
  std::vector<double> c_lattice;
  std::uint64_t c_seed = 7;
  coeff->add_option("--d", c_d, "dimension (2 or 3)");
  coeff->add_option("--lambda", c_lambda, "coupling values")->delimiter(',');
  coeff->add_option("--N", c_N, "cutoff for the resolvent route");
  coeff->add_option("--n", c_n, "Fock truncation degree for the resolvent route");
  coeff->add_option("--k", c_k, "wavevector, comma separated (default first unit axis)");
  coeff->add_flag("--f1", c_f1, "first-order coefficient (closed form, quadrature, lattice)");
  coeff->add_option("--f1-lattice", c_lattice, "cutoffs for lattice sums of f1")->delimiter(',');
  coeff->add_flag("--f2", c_f2, "second-order coefficient by Monte Carlo");
  coeff->add_option("--mc-samples", c_mc, "accepted Monte Carlo samples");
  coeff->add_option("--batches", c_batches, "Monte Carlo batches for the stderr");
  coeff->add_option("--seed", c_seed, "Monte Carlo seed");
  coeff->add_option("--threads", c_threads, "Monte Carlo partition count");
  coeff->add_option("--norm", c_norm, "mollifier norm: default|euclidean|sup");
  coeff->add_option("--cache-dir", cache_dir, "kernel snapshot cache");
  common(coeff);

  // verify
  auto* verify = app.add_subcommand("verify", "run the invariant suite");
  std::vector<std::string> v_only;
  std::vector<double> v_N;
  int v_d = 0, v_threads = 1;
  double v_mc = 1e6;
  std::uint64_t v_seed = 7;
  verify->add_option("--only", v_only, "checks to run")->delimiter(',');
  verify->add_option("--d", v_d, "dimension hint (decoupling is d=3, replacement d=2)");
  verify->add_option("--N", v_N, "cutoffs for the selected check")->delimiter(',');
  verify->add_option("--mc-samples", v_mc, "Monte Carlo samples for the corollary check");
  verify->add_option("--seed", v_seed, "seed");
  verify->add_option("--threads", v_threads, "Monte Carlo partition count");
  common(verify);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "run the truncated stochastic dynamics");
  std::string s_config, s_norm = "default", s_conv = "automatic", s_estimate = "green-kubo";
  int s_d = 3, s_threads = 0;
  long long s_ensemble = 64, s_stride = 0;
  double s_lambda = 0.5, s_N = 0.0, s_T = 1.0, s_dt = 0.0, s_window = 0.0;
  std::uint64_t s_seed = 1;
  std::vector<std::string> s_k;
  simulate->add_option("--config", s_config, "JSON config (see tools/schemas)");
  auto* o_d = simulate->add_option("--d", s_d, "dimension");
  auto* o_l = simulate->add_option("--lambda", s_lambda, "coupling");
  auto* o_N = simulate->add_option("--N", s_N, "cutoff (default 4.5 for d=3, 8 for d=2)");
  auto* o_T = simulate->add_option("--T", s_T, "horizon");
  auto* o_e = simulate->add_option("--ensemble", s_ensemble, "members");
  auto* o_s = simulate->add_option("--seed", s_seed, "seed");
  auto* o_dt = simulate->add_option("--dt", s_dt, "step (0: 0.1/(2 pi N)^2)");
  auto* o_st = simulate->add_option("--stride", s_stride, "record every n steps (0: auto)");
  auto* o_no = simulate->add_option("--norm", s_norm, "mollifier norm");
  auto* o_c = simulate->add_option("--convolution", s_conv, "automatic|direct|pseudospectral");
  auto* o_k = simulate->add_option("--k", s_k, "observed wavevector, repeatable, e.g. 1,0,0");
  auto* o_es = simulate->add_option("--estimate", s_estimate, "none|green-kubo|autocorr|both");
  auto* o_w = simulate->add_option("--window", s_window, "Green-Kubo window (0: horizon)");
  simulate->add_option("--threads", s_threads, "worker threads");
  for (auto* o : {o_d, o_l, o_N, o_T, o_e, o_s, o_dt, o_st, o_no, o_c, o_k, o_es, o_w}) {
    o->excludes(simulate->get_option("--config"));
  }
  common(simulate);

  // replay
  auto* replay = app.add_subcommand("replay", "re-run a manifest and compare output digests");
  std::string r_manifest;
  replay->add_option("manifest", r_manifest, "manifest.json of an earlier run")->required();
  common(replay);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  std::ostream* log = quiet ? nullptr : &std::clog;

  try {
    std::string command;
    Json params;
    if (*coeff) {
      command = "coeff";
      if ((c_N > 0.0) != (c_n > 0)) throw InvalidInput("--N and --n go together");
      if (c_d == 3 && !c_f1 && !c_f2 && c_N == 0.0) c_f1 = true;
      if (!c_lattice.empty()) c_f1 = true;
      if (c_d == 2 && (c_f1 || c_f2)) throw InvalidInput("--f1/--f2 are d=3 constants");
      if (c_N > 0.0) llns::ModelParams::make(c_d, 1.0, c_N, c_n).validate();
      for (double N : c_lattice) llns::ModelParams::make(3, 1.0, N).validate();
      if (c_threads < 1) throw InvalidInput("--threads must be >= 1");
      std::vector<int> k(std::size_t(c_d), 0);
      k[0] = 1;
      if (!c_k.empty()) k = parse_ints(c_k, "--k");
      const auto norm = c_norm == "default" ? llns::ModelParams::make(c_d, 1.0, c_d == 2 ? 2 : 1.5).norm
                                            : llns::parse_norm(c_norm);
      params = {{"d", c_d},
                {"lambda", c_lambda},
                {"N", c_N > 0.0 ? Json(c_N) : Json(nullptr)},
                {"n", c_n > 0 ? Json(c_n) : Json(nullptr)},
                {"k", k},
                {"norm", llns::to_string(norm)},
                {"f1", c_f1},
                {"f1_lattice", c_lattice},
                {"f2", c_f2},
                {"mc_samples", exact_count(c_mc, "--mc-samples")},
                {"batches", c_batches},
                {"seed", c_seed},
                {"partitions", c_threads}};
    } else if (*verify) {
      command = "verify";
      std::vector<double> NR{64, 128, 256, 512}, ND{4.5, 8.5, 16.5};
      if (!v_N.empty()) {
        const bool rep = std::find(v_only.begin(), v_only.end(), "replacement") != v_only.end();
        const bool dec = std::find(v_only.begin(), v_only.end(), "decoupling") != v_only.end();
        if (rep == dec) {
          throw InvalidInput("--N needs --only with exactly one of replacement, decoupling");
        }
        (rep ? NR : ND) = v_N;
      }
      if (v_d != 0) {
        const bool dec = std::find(v_only.begin(), v_only.end(), "decoupling") != v_only.end();
        const bool rep = std::find(v_only.begin(), v_only.end(), "replacement") != v_only.end();
        if ((v_d == 2 && dec) || (v_d == 3 && rep) || (v_d != 2 && v_d != 3)) {
          throw InvalidInput("--d does not match the selected checks");
        }
      }
      if (v_threads < 1) throw InvalidInput("--threads must be >= 1");
      params = {{"only", v_only},
                {"N_replacement", NR},
                {"N_decoupling", ND},
                {"mc_samples", exact_count(v_mc, "--mc-samples")},
                {"seed", v_seed},
                {"partitions", v_threads}};
    } else if (*simulate) {
      command = "simulate";
      Json config;
      if (!s_config.empty()) {
        std::ifstream in(s_config);
        if (!in) throw InvalidInput("cannot open config " + s_config);
        try {
          config = Json::parse(in);
        } catch (const nlohmann::json::parse_error& e) {
          throw InvalidInput(std::string("config: ") + e.what());
        }
      } else {
        if (s_N == 0.0) s_N = s_d == 2 ? 8.0 : 4.5;
        config = {{"d", s_d},         {"lambda", s_lambda},     {"N", s_N},
                  {"T", s_T},         {"ensemble", s_ensemble}, {"seed", s_seed},
                  {"dt", s_dt},       {"stride", s_stride},     {"norm", s_norm},
                  {"convolution", s_conv}, {"estimate", s_estimate}, {"window", s_window}};
        Json obs = Json::array();
        for (const auto& k : s_k) obs.push_back(parse_ints(k, "--k"));
        config["observed"] = obs;
      }
      if (s_threads > 0) config["threads"] = s_threads;
      params = llns::cli::resolve_simulate_config(config);
    } else {
      const auto m = llns::cli::RunManifest::load(r_manifest);
      const fs::path out =
          out_dir.empty() ? fs::path(r_manifest).parent_path() / "replay" : fs::path(out_dir);
      int code = 0;
      llns::cli::RunContext ctx{out, std::nullopt, log};
      const auto again = llns::cli::execute(m.command, m.params, ctx, code);
      bool same = m.outputs.size() == again.outputs.size();
      for (const auto& [name, digest] : m.outputs) {
        const auto it = again.outputs.find(name);
        const bool ok = it != again.outputs.end() && it->second == digest;
        same = same && ok;
        std::cout << (ok ? "match    " : "MISMATCH ") << name << '\n';
      }
      if (m.code_version != again.code_version) {
        std::cout << "note: recorded with " << m.code_version << ", replayed with "
                  << again.code_version << '\n';
      }
      return same && code == 0 ? 0 : 1;
    }

    const fs::path out = out_dir.empty() ? default_out(command) : fs::path(out_dir);
    llns::cli::RunContext ctx{out, std::nullopt, log};
    if (!cache_dir.empty()) ctx.cache_dir = fs::path(cache_dir);
    int code = 0;
    llns::cli::execute(command, params, ctx, code);
    std::cout << "wrote " << (out / "manifest.json").string() << '\n';
    return code;
  } catch (const InvalidInput& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const llns::ConvergenceError& e) {
    std::cerr << "error: " << e.what() << " (residual " << e.residual() << " after "
              << e.iterations() << " iterations)\n";
    return 1;
  } catch (const llns::ResourceLimit& e) {
    std::cerr << "error: " << e.what() << " (estimated " << e.estimated_bytes() / 1e9
              << " GB)\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
