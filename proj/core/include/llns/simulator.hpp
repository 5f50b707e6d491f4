// Copyright 2026 The llns authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "llns/divfree_basis.hpp"
#include "llns/model_params.hpp"

namespace llns::sim {

using basis::CVec;
using Coeffs = std::array<cplx, 2>;

enum class Convolution { automatic, direct, pseudospectral };
std::string to_string(Convolution c);
Convolution parse_convolution(const std::string& s);

struct SimConfig {
  ModelParams model;
  double dt = 0.0;        // 0 selects default_dt
  double horizon = 1.0;
  int ensemble = 8;
  std::uint64_t seed = 1;
  int threads = 1;
  int stride = 1;         // record every `stride` steps
  std::vector<WaveVector> observed;  // empty selects the unit axes
  Convolution convolution = Convolution::automatic;

  static double default_dt(double cutoff);
  double step_size() const { return dt > 0.0 ? dt : default_dt(model.N); }
  long steps() const;
  std::vector<WaveVector> observed_or_default() const;
  // Throws InvalidInput.
  void validate() const;
};

// Retained modes k in the positive half with ||k|| <= N, their frames and
// decay rates, and a grid lookup for +-k.
class ModeLayout {
 public:
  explicit ModeLayout(const ModelParams& p);

  const ModelParams& params() const { return params_; }
  std::size_t size() const { return modes_.size(); }
  int frames_per_mode() const { return params_.dim - 1; }
  const WaveVector& mode(std::size_t i) const { return modes_[i]; }
  const basis::Frame& frame(std::size_t i) const { return frames_[i]; }
  double rate(std::size_t i) const { return rates_[i]; }
  int radius() const { return radius_; }

  struct Hit {
    std::size_t index;
    bool conjugate;  // k is the negative of the stored mode
  };
  std::optional<Hit> lookup(const WaveVector& k) const;

 private:
  long cell(const WaveVector& k) const;

  ModelParams params_;
  std::vector<WaveVector> modes_;
  std::vector<basis::Frame> frames_;
  std::vector<double> rates_;
  int radius_ = 0;
  int side_ = 0;
  std::vector<long> grid_;
};

struct SpectralState {
  std::shared_ptr<const ModeLayout> layout;
  double time = 0.0;
  std::vector<Coeffs> u;

  // Componentwise u^(k) for any retained k of either sign.
  CVec velocity(const WaveVector& k) const;
  CVec velocity(std::size_t i) const;
  double mean_mode_energy() const;
};

std::shared_ptr<const ModeLayout> make_layout(const ModelParams& p);

SpectralState sample_invariant_state(const SimConfig& cfg, std::uint64_t seed,
                                     std::uint64_t member = 0);

// Evaluates B^(k) for every retained positive mode. Holds scratch buffers,
// one instance per thread.
class Nonlinearity {
 public:
  Nonlinearity(std::shared_ptr<const ModeLayout> layout, Convolution method);
  ~Nonlinearity();
  Nonlinearity(const Nonlinearity&) = delete;
  Nonlinearity& operator=(const Nonlinearity&) = delete;

  std::vector<CVec> operator()(const SpectralState& s);
  Convolution method() const { return method_; }

 private:
  std::vector<CVec> direct(const SpectralState& s);
  std::vector<CVec> spectral(const SpectralState& s);

  std::shared_ptr<const ModeLayout> layout_;
  Convolution method_;
  struct Fft;
  std::unique_ptr<Fft> fft_;
};

std::vector<CVec> nonlinearity_B(const SpectralState& s,
                                 Convolution method = Convolution::automatic);

// Frame coefficient a_{k,alpha} . B^(k), alpha zero-based.
cplx frame_component(const ModeLayout& layout, std::size_t i, int alpha, const CVec& B);

// Re sum over positive k of conj(u^(k)) . B^(k): half of the full pairing.
double energy_pairing(const SpectralState& s, const std::vector<CVec>& B);

// Standard complex normals (E|xi|^2 = 1) keyed by (seed, member, k, alpha, step).
std::vector<Coeffs> standard_noise(const ModeLayout& layout, std::uint64_t seed,
                                   std::uint64_t member, std::uint64_t step);

// Exponential Euler with explicit noise; B is the nonlinearity at the
// current state.
void step_with_noise(SpectralState& s, const std::vector<CVec>& B,
                     const std::vector<Coeffs>& xi, double dt, double lambda_N);

// One step with the counter-keyed noise. Returns B at the pre-step state.
std::vector<CVec> step(SpectralState& s, const SimConfig& cfg, Nonlinearity& nl,
                       std::uint64_t member, std::uint64_t step_index);

struct Observable {
  WaveVector k;  // positive-half representative
  int alpha;     // 1-based
  std::string id() const;
};

struct MemberTrace {
  std::vector<cplx> integral;  // [record][observable], lambda_N int B_{k,alpha}
  std::vector<cplx> coeff;     // [record][observable], u_{k,alpha}
  std::vector<double> energy;  // [record], mean |u|^2 per frame coefficient
};

struct Trajectory {
  SimConfig config;
  std::vector<double> times;
  std::vector<Observable> observables;
  std::vector<MemberTrace> members;

  std::size_t records() const { return times.size(); }
  cplx integral(std::size_t m, std::size_t r, std::size_t o) const {
    return members[m].integral[r * observables.size() + o];
  }
  cplx coeff(std::size_t m, std::size_t r, std::size_t o) const {
    return members[m].coeff[r * observables.size() + o];
  }
  // CSV: time,observable,re,im; observable ids carry the member index.
  void write_csv(std::ostream& os) const;
};

// Throws ComputationError on a non-finite state.
Trajectory run(const SimConfig& cfg);

struct Estimate {
  double value = 0.0;
  double stderr_ = 0.0;
  int samples = 0;
  std::string method;
};

// |I|^2 / (2 w (2 pi |k|)^2) over members; window w = 0 uses the final time,
// otherwise non-overlapping windows of that length.
Estimate estimator_green_kubo(const Trajectory& t, const WaveVector& k, int alpha,
                              double window = 0.0);
// Pools every observable into one per-member average.
Estimate estimator_green_kubo_pooled(const Trajectory& t, double window = 0.0);

// Fits exp(-(1+D)(2 pi|k|)^2 s) to the stationary autocorrelation of u_{k,.}.
Estimate estimator_mode_autocorr(const Trajectory& t, const WaveVector& k,
                                 int max_lag_records = 0);

}  // namespace llns::sim
