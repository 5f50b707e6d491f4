// Copyright 2026 The llns authors
// SPDX-License-Identifier: Apache-2.0
#include "llns/simulator.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <thread>

#include "llns/error.hpp"
#include "llns/format.hpp"
#include "llns/philox.hpp"
#include "llns/statistics.hpp"

namespace llns::sim {
namespace {

constexpr std::uint64_t kInitialStep = 0xFFFFFFFFull;
constexpr int kDirectCutoff = 1;

std::mutex& planner_mutex() {
  static std::mutex mu;
  return mu;
}

}  // namespace

std::string to_string(Convolution c) {
  switch (c) {
    case Convolution::direct: return "direct";
    case Convolution::pseudospectral: return "pseudospectral";
    default: return "automatic";
  }
}

Convolution parse_convolution(const std::string& s) {
  if (s == "automatic") return Convolution::automatic;
  if (s == "direct") return Convolution::direct;
  if (s == "pseudospectral") return Convolution::pseudospectral;
  throw InvalidInput("unknown convolution '" + s + "' (automatic|direct|pseudospectral)");
}

double SimConfig::default_dt(double cutoff) {
  const double w = kTwoPi * cutoff;
  return 0.1 / (w * w);
}

long SimConfig::steps() const { return std::lround(horizon / step_size()); }

std::vector<WaveVector> SimConfig::observed_or_default() const {
  if (!observed.empty()) return observed;
  std::vector<WaveVector> axes;
  for (int i = 0; i < model.dim; ++i) {
    std::array<int, 3> c{0, 0, 0};
    c[std::size_t(i)] = 1;
    axes.push_back(WaveVector::of(model.dim, c));
  }
  return axes;
}

void SimConfig::validate() const {
  model.validate();
  if (dt < 0.0 || !std::isfinite(dt)) throw InvalidInput("dt must be >= 0 (0 selects the default)");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw InvalidInput("horizon T must be > 0");
  if (ensemble < 1) throw InvalidInput("ensemble must be >= 1");
  if (threads < 1) throw InvalidInput("threads must be >= 1");
  if (stride < 1) throw InvalidInput("stride must be >= 1");
  if (steps() < 1) throw InvalidInput("horizon shorter than one step");
  if (std::uint64_t(steps()) >= kInitialStep) throw InvalidInput("too many steps");
  for (const auto& k : observed) {
    if (k.dim != model.dim || k.is_zero() || !model.in_ball(k)) {
      throw InvalidInput("observed wavevector " + k.str() + " is not a retained mode");
    }
  }
}

ModeLayout::ModeLayout(const ModelParams& p) : params_(p) {
  p.validate();
  radius_ = int(std::floor(p.N));
  side_ = 2 * radius_ + 1;
  grid_.assign(std::size_t(std::pow(side_, p.dim)), 0);
  for (const auto& k : *ball_points(p)) {
    if (!k.in_positive_half()) continue;
    modes_.push_back(k);
    frames_.push_back(basis::frame(k));
    rates_.push_back(kTwoPi * kTwoPi * double(k.norm2()));
  }
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    grid_[std::size_t(cell(modes_[i]))] = long(i) + 1;
    grid_[std::size_t(cell(-modes_[i]))] = -(long(i) + 1);
  }
}

long ModeLayout::cell(const WaveVector& k) const {
  long idx = 0;
  for (int i = 0; i < params_.dim; ++i) {
    const int v = k[i];
    if (v < -radius_ || v > radius_) return -1;
    idx = idx * side_ + (v + radius_);
  }
  return idx;
}

std::optional<ModeLayout::Hit> ModeLayout::lookup(const WaveVector& k) const {
  const long c = cell(k);
  if (c < 0) return std::nullopt;
  const long g = grid_[std::size_t(c)];
  if (g == 0) return std::nullopt;
  return Hit{std::size_t(std::labs(g) - 1), g < 0};
}

CVec SpectralState::velocity(std::size_t i) const {
  const auto& f = layout->frame(i);
  CVec v{};
  for (int a = 0; a < f.count; ++a) {
    for (int l = 0; l < 3; ++l) v[std::size_t(l)] += u[i][std::size_t(a)] * f[a][std::size_t(l)];
  }
  return v;
}

CVec SpectralState::velocity(const WaveVector& k) const {
  const auto hit = layout->lookup(k);
  if (!hit) return CVec{};
  CVec v = velocity(hit->index);
  if (hit->conjugate) {
    for (auto& x : v) x = std::conj(x);
  }
  return v;
}

double SpectralState::mean_mode_energy() const {
  double s = 0.0;
  const int f = layout->frames_per_mode();
  for (const auto& c : u) {
    for (int a = 0; a < f; ++a) s += std::norm(c[std::size_t(a)]);
  }
  return s / double(u.size() * std::size_t(f));
}

std::shared_ptr<const ModeLayout> make_layout(const ModelParams& p) {
  return std::make_shared<const ModeLayout>(p);
}

std::vector<Coeffs> standard_noise(const ModeLayout& layout, std::uint64_t seed,
                                   std::uint64_t member, std::uint64_t step) {
  const rng::Key key = rng::key_from_seed(seed);
  std::vector<Coeffs> xi(layout.size());
  const double h = std::sqrt(0.5);
  for (std::size_t i = 0; i < layout.size(); ++i) {
    const std::uint64_t pk = pack(layout.mode(i));
    for (int a = 0; a < layout.frames_per_mode(); ++a) {
      const rng::Counter ctr{std::uint32_t(step), std::uint32_t(member), std::uint32_t(pk),
                             std::uint32_t(pk >> 32) | (std::uint32_t(a) << 31)};
      const auto z = rng::normals(rng::philox4x32(ctr, key));
      xi[i][std::size_t(a)] = cplx(h * z[0], h * z[1]);
    }
  }
  return xi;
}

SpectralState sample_invariant_state(const SimConfig& cfg, std::uint64_t seed,
                                     std::uint64_t member) {
  SpectralState s;
  s.layout = make_layout(cfg.model);
  s.time = 0.0;
  s.u = standard_noise(*s.layout, seed, member, kInitialStep);
  return s;
}

struct Nonlinearity::Fft {
  int G = 0;
  std::size_t total = 0;
  std::array<fftw_complex*, 3> vel{};
  std::array<fftw_complex*, 6> prod{};
  fftw_plan backward = nullptr;
  fftw_plan forward = nullptr;

  Fft(int grid, int dim) : G(grid) {
    total = std::size_t(std::pow(G, dim));
    for (auto& p : vel) p = fftw_alloc_complex(total);
    for (auto& p : prod) p = fftw_alloc_complex(total);
    std::array<int, 3> n{G, G, G};
    std::lock_guard<std::mutex> lock(planner_mutex());
    backward = fftw_plan_dft(dim, n.data(), vel[0], vel[0], FFTW_BACKWARD, FFTW_ESTIMATE);
    forward = fftw_plan_dft(dim, n.data(), prod[0], prod[0], FFTW_FORWARD, FFTW_ESTIMATE);
  }
  ~Fft() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(backward);
    fftw_destroy_plan(forward);
    for (auto p : vel) fftw_free(p);
    for (auto p : prod) fftw_free(p);
  }
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  std::size_t index(const WaveVector& k, int dim) const {
    std::size_t idx = 0;
    for (int i = 0; i < dim; ++i) idx = idx * std::size_t(G) + std::size_t(((k[i] % G) + G) % G);
    return idx;
  }
};

Nonlinearity::Nonlinearity(std::shared_ptr<const ModeLayout> layout, Convolution method)
    : layout_(std::move(layout)), method_(method) {
  if (method_ == Convolution::automatic) {
    method_ = layout_->radius() <= kDirectCutoff ? Convolution::direct
                                                 : Convolution::pseudospectral;
  }
  if (method_ == Convolution::pseudospectral) {
    int G = 3 * layout_->radius() + 1;
    if (G % 2) ++G;
    fft_ = std::make_unique<Fft>(G, layout_->params().dim);
  }
}

Nonlinearity::~Nonlinearity() = default;

std::vector<CVec> Nonlinearity::operator()(const SpectralState& s) {
  if (s.layout.get() != layout_.get() && s.layout->size() != layout_->size()) {
    throw InvalidInput("state layout does not match the nonlinearity");
  }
  return method_ == Convolution::direct ? direct(s) : spectral(s);
}

namespace {

// B^(k) = i 2 pi P(k) acc
CVec finish_mode(const WaveVector& k, const CVec& acc, int dim) {
  const Mat P = basis::leray_matrix(k);
  CVec out{};
  for (int a = 0; a < dim; ++a) {
    cplx s = 0.0;
    for (int b = 0; b < dim; ++b) s += P[std::size_t(a)][std::size_t(b)] * acc[std::size_t(b)];
    out[std::size_t(a)] = cplx(0.0, kTwoPi) * s;
  }
  return out;
}

}  // namespace

std::vector<CVec> Nonlinearity::direct(const SpectralState& s) {
  const auto& L = *layout_;
  const int d = L.params().dim;
  const std::size_t M = L.size();
  std::vector<CVec> vel(M);
  for (std::size_t i = 0; i < M; ++i) vel[i] = s.velocity(i);
  std::vector<CVec> acc(M, CVec{});
  for (std::size_t i1 = 0; i1 < M; ++i1) {
    for (int sgn = 0; sgn < 2; ++sgn) {
      const WaveVector k1 = sgn ? -L.mode(i1) : L.mode(i1);
      CVec u1 = vel[i1];
      if (sgn) {
        for (auto& x : u1) x = std::conj(x);
      }
      for (std::size_t j = 0; j < M; ++j) {
        const WaveVector& k = L.mode(j);
        const auto hit = L.lookup(k - k1);
        if (!hit) continue;
        const CVec& u2 = vel[hit->index];
        cplx kd = 0.0;
        for (int a = 0; a < d; ++a) kd += double(k[a]) * u1[std::size_t(a)];
        if (hit->conjugate) {
          for (int a = 0; a < d; ++a) acc[j][std::size_t(a)] += kd * std::conj(u2[std::size_t(a)]);
        } else {
          for (int a = 0; a < d; ++a) acc[j][std::size_t(a)] += kd * u2[std::size_t(a)];
        }
      }
    }
  }
  std::vector<CVec> B(M);
  for (std::size_t j = 0; j < M; ++j) B[j] = finish_mode(L.mode(j), acc[j], d);
  return B;
}

std::vector<CVec> Nonlinearity::spectral(const SpectralState& s) {
  const auto& L = *layout_;
  const int d = L.params().dim;
  auto& F = *fft_;
  for (int a = 0; a < d; ++a) std::fill_n(&F.vel[std::size_t(a)][0][0], 2 * F.total, 0.0);
  for (std::size_t i = 0; i < L.size(); ++i) {
    const CVec v = s.velocity(i);
    const std::size_t ip = F.index(L.mode(i), d), in = F.index(-L.mode(i), d);
    for (int a = 0; a < d; ++a) {
      F.vel[std::size_t(a)][ip][0] = v[std::size_t(a)].real();
      F.vel[std::size_t(a)][ip][1] = v[std::size_t(a)].imag();
      F.vel[std::size_t(a)][in][0] = v[std::size_t(a)].real();
      F.vel[std::size_t(a)][in][1] = -v[std::size_t(a)].imag();
    }
  }
  for (int a = 0; a < d; ++a) fftw_execute_dft(F.backward, F.vel[std::size_t(a)], F.vel[std::size_t(a)]);
  int slot = 0;
  std::array<std::array<int, 3>, 3> pair_slot{};
  for (int a = 0; a < d; ++a) {
    for (int b = a; b < d; ++b) {
      pair_slot[std::size_t(a)][std::size_t(b)] = pair_slot[std::size_t(b)][std::size_t(a)] = slot;
      auto* out = F.prod[std::size_t(slot)];
      const auto* va = F.vel[std::size_t(a)];
      const auto* vb = F.vel[std::size_t(b)];
      // real fields: imaginary parts are rounding noise
      for (std::size_t x = 0; x < F.total; ++x) {
        out[x][0] = va[x][0] * vb[x][0];
        out[x][1] = 0.0;
      }
      fftw_execute_dft(F.forward, out, out);
      ++slot;
    }
  }
  const double norm = 1.0 / double(F.total);
  std::vector<CVec> B(L.size());
  for (std::size_t j = 0; j < L.size(); ++j) {
    const WaveVector& k = L.mode(j);
    const std::size_t idx = F.index(k, d);
    CVec acc{};
    for (int b = 0; b < d; ++b) {
      for (int a = 0; a < d; ++a) {
        const auto* w = F.prod[std::size_t(pair_slot[std::size_t(a)][std::size_t(b)])];
        acc[std::size_t(b)] += double(k[a]) * cplx(w[idx][0], w[idx][1]) * norm;
      }
    }
    B[j] = finish_mode(k, acc, d);
  }
  return B;
}

std::vector<CVec> nonlinearity_B(const SpectralState& s, Convolution method) {
  Nonlinearity nl(s.layout, method);
  return nl(s);
}

cplx frame_component(const ModeLayout& layout, std::size_t i, int alpha, const CVec& B) {
  const auto& a = layout.frame(i)[alpha];
  return a[0] * B[0] + a[1] * B[1] + a[2] * B[2];
}

double energy_pairing(const SpectralState& s, const std::vector<CVec>& B) {
  double e = 0.0;
  for (std::size_t i = 0; i < s.u.size(); ++i) {
    const CVec v = s.velocity(i);
    for (int a = 0; a < 3; ++a) e += (std::conj(v[std::size_t(a)]) * B[i][std::size_t(a)]).real();
  }
  return e;
}

void step_with_noise(SpectralState& s, const std::vector<CVec>& B,
                     const std::vector<Coeffs>& xi, double dt, double lambda_N) {
  const auto& L = *s.layout;
  for (std::size_t i = 0; i < L.size(); ++i) {
    const double mu = L.rate(i);
    const double decay = std::exp(-mu * dt);
    const double spread = std::sqrt(-std::expm1(-2.0 * mu * dt));
    for (int a = 0; a < L.frames_per_mode(); ++a) {
      const cplx b = frame_component(L, i, a, B[i]);
      auto& u = s.u[i][std::size_t(a)];
      u = decay * (u - dt * lambda_N * b) + spread * xi[i][std::size_t(a)];
    }
  }
  s.time += dt;
}

std::vector<CVec> step(SpectralState& s, const SimConfig& cfg, Nonlinearity& nl,
                       std::uint64_t member, std::uint64_t step_index) {
  const double lam = cfg.model.lambda_N();
  std::vector<CVec> B = lam == 0.0 ? std::vector<CVec>(s.u.size(), CVec{}) : nl(s);
  const auto xi = standard_noise(*s.layout, cfg.seed, member, step_index);
  step_with_noise(s, B, xi, cfg.step_size(), lam);
  return B;
}

std::string Observable::id() const {
  std::string s = "k=";
  s += k.str();
  s += ";a=" + std::to_string(alpha);
  return s;
}

void Trajectory::write_csv(std::ostream& os) const {
  os << "time,observable,re,im\n";
  const std::size_t O = observables.size();
  for (std::size_t m = 0; m < members.size(); ++m) {
    const std::string pre = "m" + std::to_string(m) + ":";
    for (std::size_t r = 0; r < times.size(); ++r) {
      const std::string t = shortest(times[r]);
      for (std::size_t o = 0; o < O; ++o) {
        const cplx I = integral(m, r, o);
        const cplx u = coeff(m, r, o);
        os << t << ',' << pre << "I[" << observables[o].id() << "]," << shortest(I.real())
           << ',' << shortest(I.imag()) << '\n';
        os << t << ',' << pre << "u[" << observables[o].id() << "]," << shortest(u.real())
           << ',' << shortest(u.imag()) << '\n';
      }
      os << t << ',' << pre << "energy," << shortest(members[m].energy[r]) << ",0\n";
    }
  }
}

Trajectory run(const SimConfig& cfg) {
  cfg.validate();
  Trajectory tr;
  tr.config = cfg;
  const auto layout = make_layout(cfg.model);
  for (WaveVector k : cfg.observed_or_default()) {
    if (!k.in_positive_half()) k = -k;
    if (!layout->lookup(k)) throw InvalidInput("observed wavevector " + k.str() + " not retained");
    for (int a = 1; a <= layout->frames_per_mode(); ++a) tr.observables.push_back({k, a});
  }
  const long steps = cfg.steps();
  const double dt = cfg.step_size();
  const double lam = cfg.model.lambda_N();
  for (long n = 0; n <= steps; n += cfg.stride) tr.times.push_back(double(n) * dt);
  tr.members.resize(std::size_t(cfg.ensemble));

  std::vector<std::size_t> obs_index;
  for (const auto& o : tr.observables) obs_index.push_back(layout->lookup(o.k)->index);

  auto run_member = [&](int m) {
    Nonlinearity nl(layout, cfg.convolution);
    SpectralState s = sample_invariant_state(cfg, cfg.seed, std::uint64_t(m));
    MemberTrace& trace = tr.members[std::size_t(m)];
    std::vector<cplx> I(tr.observables.size(), cplx(0.0));
    auto record = [&]() {
      for (std::size_t o = 0; o < I.size(); ++o) {
        trace.integral.push_back(I[o]);
        trace.coeff.push_back(s.u[obs_index[o]][std::size_t(tr.observables[o].alpha - 1)]);
      }
      const double e = s.mean_mode_energy();
      if (!std::isfinite(e)) {
        throw ComputationError("non-finite state in member " + std::to_string(m) +
                               " at t=" + std::to_string(s.time));
      }
      trace.energy.push_back(e);
    };
    record();
    for (long n = 1; n <= steps; ++n) {
      const auto B = step(s, cfg, nl, std::uint64_t(m), std::uint64_t(n - 1));
      for (std::size_t o = 0; o < I.size(); ++o) {
        I[o] += dt * lam * frame_component(*layout, obs_index[o], tr.observables[o].alpha - 1,
                                           B[obs_index[o]]);
      }
      if (n % cfg.stride == 0) record();
    }
  };

  const int T = std::max(1, std::min(cfg.threads, cfg.ensemble));
  if (T == 1) {
    for (int m = 0; m < cfg.ensemble; ++m) run_member(m);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(T));
    for (int t = 0; t < T; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (int m = t; m < cfg.ensemble; m += T) run_member(m);
        } catch (...) {
          errors[std::size_t(t)] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  return tr;
}

namespace {

std::size_t observable_index(const Trajectory& t, WaveVector k, int alpha) {
  if (!k.in_positive_half()) k = -k;
  for (std::size_t o = 0; o < t.observables.size(); ++o) {
    if (t.observables[o].k == k && t.observables[o].alpha == alpha) return o;
  }
  throw InvalidInput("trajectory does not record " + k.str() + " alpha=" + std::to_string(alpha));
}

// Per-member Green-Kubo values for one observable.
std::vector<double> gk_per_member(const Trajectory& t, std::size_t o, double window) {
  const double mu = kTwoPi * kTwoPi * double(t.observables[o].k.norm2());
  const std::size_t R = t.records();
  if (R < 2) throw InvalidInput("trajectory too short");
  const double spacing = t.times[1] - t.times[0];
  std::size_t w = R - 1;
  if (window > 0.0) {
    w = std::size_t(std::lround(window / spacing));
    if (w < 1 || w > R - 1) throw InvalidInput("Green-Kubo window outside the trajectory");
  }
  const double len = double(w) * spacing;
  std::vector<double> out;
  for (std::size_t m = 0; m < t.members.size(); ++m) {
    double acc = 0.0;
    int count = 0;
    for (std::size_t r0 = 0; r0 + w < R; r0 += w) {
      acc += std::norm(t.integral(m, r0 + w, o) - t.integral(m, r0, o)) / (2.0 * len * mu);
      ++count;
    }
    out.push_back(acc / count);
  }
  return out;
}

void require_members(const Trajectory& t) {
  if (t.members.size() < 8) {
    throw InvalidInput("estimators need at least 8 ensemble members, got " +
                       std::to_string(t.members.size()));
  }
}

}  // namespace

Estimate estimator_green_kubo(const Trajectory& t, const WaveVector& k, int alpha,
                              double window) {
  require_members(t);
  const auto v = gk_per_member(t, observable_index(t, k, alpha), window);
  const auto me = stats::mean_stderr(v);
  return {me.mean, me.stderr_, int(v.size()), "green-kubo"};
}

Estimate estimator_green_kubo_pooled(const Trajectory& t, double window) {
  require_members(t);
  std::vector<double> pooled(t.members.size(), 0.0);
  for (std::size_t o = 0; o < t.observables.size(); ++o) {
    const auto v = gk_per_member(t, o, window);
    for (std::size_t m = 0; m < v.size(); ++m) pooled[m] += v[m] / double(t.observables.size());
  }
  const auto me = stats::mean_stderr(pooled);
  return {me.mean, me.stderr_, int(pooled.size()), "green-kubo-pooled"};
}

Estimate estimator_mode_autocorr(const Trajectory& t, const WaveVector& k, int max_lag) {
  require_members(t);
  std::vector<std::size_t> obs;
  WaveVector kp = k.in_positive_half() ? k : -k;
  for (std::size_t o = 0; o < t.observables.size(); ++o) {
    if (t.observables[o].k == kp) obs.push_back(o);
  }
  if (obs.empty()) throw InvalidInput("trajectory does not record " + k.str());
  const double mu = kTwoPi * kTwoPi * double(kp.norm2());
  const std::size_t R = t.records();
  const double spacing = t.times[1] - t.times[0];
  std::size_t L = max_lag > 0 ? std::size_t(max_lag)
                              : std::size_t(std::ceil(2.3 / (mu * spacing)));
  L = std::max<std::size_t>(1, std::min(L, R / 2));
  const std::size_t M = t.members.size();

  // corr[m][lag]: member sums of Re u(r+lag) conj u(r) and counts
  std::vector<std::vector<double>> corr(M, std::vector<double>(L + 1, 0.0));
  std::vector<double> counts(L + 1, 0.0);
  for (std::size_t lag = 0; lag <= L; ++lag) counts[lag] = double((R - lag) * obs.size());
  for (std::size_t m = 0; m < M; ++m) {
    for (std::size_t lag = 0; lag <= L; ++lag) {
      double s = 0.0;
      for (std::size_t o : obs) {
        for (std::size_t r = 0; r + lag < R; ++r) {
          s += (t.coeff(m, r + lag, o) * std::conj(t.coeff(m, r, o))).real();
        }
      }
      corr[m][lag] = s;
    }
  }
  auto fit = [&](std::size_t skip) {
    std::vector<double> c(L + 1, 0.0);
    for (std::size_t m = 0; m < M; ++m) {
      if (m == skip) continue;
      for (std::size_t lag = 0; lag <= L; ++lag) c[lag] += corr[m][lag];
    }
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t lag = 1; lag <= L; ++lag) {
      const double ratio = c[lag] / c[0];
      if (!(ratio > 0.05)) break;
      const double s = double(lag) * spacing;
      sxy += s * -std::log(ratio);
      sxx += s * s;
    }
    if (sxx == 0.0) throw ComputationError("autocorrelation fit failed: no positive lag");
    return sxy / sxx / mu - 1.0;
  };
  const double all = fit(M);
  std::vector<double> jk;
  for (std::size_t m = 0; m < M; ++m) jk.push_back(fit(m));
  const double jm = std::accumulate(jk.begin(), jk.end(), 0.0) / double(M);
  double ss = 0.0;
  for (double v : jk) ss += (v - jm) * (v - jm);
  (void)counts;
  return {all, std::sqrt(double(M - 1) / double(M) * ss), int(M), "mode-autocorrelation"};
}

}  // namespace llns::sim
