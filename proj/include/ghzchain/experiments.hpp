#pragma once

// Studies built on the GHZ protocol: threshold-time search and its quadratic
// fit, Monte-Carlo disorder sweeps, loss sweeps and the physical-units scale
// study. Sweeps run on the worker pool; every sample derives its own seed, so
// results do not depend on scheduling.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "ghzchain/config.hpp"
#include "ghzchain/core_model.hpp"
#include "ghzchain/dynamics.hpp"
#include "ghzchain/parallel.hpp"

namespace ghzchain {

struct SweepPoint {
  std::vector<double> coords;  // one value per axis
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t samples = 0;
};

struct SweepResult {
  std::vector<std::string> axes;
  std::vector<SweepPoint> points;
  std::string spec_hash;
  std::uint64_t seed = 0;
};

inline SweepPoint summarize(std::vector<double> coords, const std::vector<double>& values) {
  SweepPoint p;
  p.coords = std::move(coords);
  p.samples = values.size();
  if (values.empty()) return p;
  double s = 0.0;
  for (double v : values) s += v;
  p.mean = s / static_cast<double>(values.size());
  if (values.size() > 1) {
    double q = 0.0;
    for (double v : values) q += (v - p.mean) * (v - p.mean);
    p.stderr_ = std::sqrt(q / static_cast<double>(values.size() - 1) / static_cast<double>(values.size()));
  }
  return p;
}

/// g0 T = a N^2 + b N + c.
struct QuadraticLaw {
  double a = 6.9419;
  double b = 2.455;
  double c = -59.8933;

  double operator()(double N) const { return a * N * N + b * N + c; }
};

/// Protocol time used by the loss and disorder studies unless set explicitly.
inline double fitted_threshold_time(int N, const QuadraticLaw& law = {}) { return law(static_cast<double>(N)); }

// ---------------------------------------------------------------------------
// Threshold search

struct ThresholdOptions {
  double resolution = 1.0;
  double max_T = 1e6;
  double initial_T = 32.0;
  /// Extra samples above the crossing used to check that F stays above target.
  int monotone_samples = 6;
  /// Allowed dip below target at those samples.
  double monotone_slack = 2e-4;
  EvolveOptions evolve{};
};

struct ThresholdResult {
  double T_star = 0.0;
  double fidelity = 0.0;
  double min_fidelity_above = 1.0;  // smallest F over the monotonicity samples
  int evaluations = 0;
};

/// Smallest g0 T on a grid of `resolution` whose lossless, disorder-free final
/// GHZ fidelity reaches `target`. Throws NumericalError when no T up to max_T
/// works or when F falls back below target right after the crossing.
inline ThresholdResult threshold_time(const ChainSpec& base, double target = 0.999, const ThresholdOptions& opt = {}) {
  if (!(target > 0.0 && target < 1.0)) throw std::invalid_argument("threshold_time: target must lie in (0, 1)");
  ChainSpec spec = base;
  spec.gamma = {0.0};
  spec.kappa = {0.0};
  spec.disorder_delta = 0.0;
  spec.tau.reset();
  validate(spec);
  const auto none = DisorderRealization::none(spec.N);
  ThresholdResult r;
  auto F = [&](double T) {
    ChainSpec s = spec;
    s.T = T;
    ++r.evaluations;
    return ghz_final_fidelity(s, none, false, opt.evolve);
  };

  double lo = 0.0;
  double hi = opt.initial_T;
  double f_hi = F(hi);
  while (f_hi < target) {
    lo = hi;
    hi *= 2.0;
    if (hi > opt.max_T) {
      if (lo >= opt.max_T) throw NumericalError("threshold_time: target fidelity not reached by g0T = " + std::to_string(opt.max_T));
      hi = opt.max_T;
    }
    f_hi = F(hi);
    if (hi >= opt.max_T && f_hi < target)
      throw NumericalError("threshold_time: target fidelity not reached by g0T = " + std::to_string(opt.max_T));
  }
  lo = std::floor(lo / opt.resolution) * opt.resolution;
  hi = std::ceil(hi / opt.resolution) * opt.resolution;
  while (hi - lo > opt.resolution * 1.5) {
    const double mid = std::round(0.5 * (lo + hi) / opt.resolution) * opt.resolution;
    const double f = F(mid);
    if (f >= target) {
      hi = mid;
      f_hi = f;
    } else {
      lo = mid;
    }
  }
  r.T_star = hi;
  r.fidelity = f_hi;
  for (int k = 1; k <= opt.monotone_samples; ++k) {
    const double T = hi + (k <= 3 ? k * opt.resolution : hi * 0.05 * (k - 3));
    r.min_fidelity_above = std::min(r.min_fidelity_above, F(T));
  }
  if (r.min_fidelity_above < target - opt.monotone_slack)
    throw NumericalError("threshold_time: fidelity is not monotone above g0T = " + std::to_string(hi));
  return r;
}

// ---------------------------------------------------------------------------
// Quadratic fit

struct FitResult {
  double a = 0.0, b = 0.0, c = 0.0;
  double residual_norm = 0.0;
  std::vector<std::pair<double, double>> points;

  double operator()(double N) const { return a * N * N + b * N + c; }
};

inline FitResult fit_quadratic(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3) throw std::invalid_argument("fit_quadratic: need at least 3 points");
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd A(n, 3);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = points[static_cast<std::size_t>(i)].first;
    A(i, 0) = x * x;
    A(i, 1) = x;
    A(i, 2) = 1.0;
    y(i) = points[static_cast<std::size_t>(i)].second;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  if (qr.rank() < 3) throw std::invalid_argument("fit_quadratic: rank-deficient design (need 3 distinct N)");
  const Eigen::VectorXd coef = qr.solve(y);
  FitResult f;
  f.a = coef(0);
  f.b = coef(1);
  f.c = coef(2);
  f.residual_norm = (A * coef - y).norm();
  f.points = points;
  return f;
}

// ---------------------------------------------------------------------------
// Sweeps

/// Mean final GHZ fidelity over `samples` disorder realizations per delta.
inline SweepResult disorder_sweep(const ChainSpec& spec, const std::vector<double>& deltas, std::size_t samples = 101,
                                  const EvolveOptions& opt = {}) {
  if (samples == 0) throw std::invalid_argument("disorder_sweep: samples must be positive");
  validate(spec);
  for (double d : deltas)
    if (!(d >= 0.0)) throw ConfigError("disorder_delta", "must be >= 0");
  std::vector<double> values(deltas.size() * samples);
  parallel_for(values.size(), [&](std::size_t job) {
    ChainSpec s = spec;
    s.disorder_delta = deltas[job / samples];
    values[job] = ghz_final_fidelity(s, apply_disorder(s, job % samples), false, opt);
  });
  SweepResult r;
  r.axes = {"delta"};
  r.spec_hash = spec_hash(spec);
  r.seed = spec.seed;
  for (std::size_t i = 0; i < deltas.size(); ++i)
    r.points.push_back(summarize({deltas[i]},
                                 std::vector<double>(values.begin() + static_cast<std::ptrdiff_t>(i * samples),
                                                     values.begin() + static_cast<std::ptrdiff_t>((i + 1) * samples))));
  return r;
}

/// Qutrit decay vector for a uniform rate, optionally sparing the two end qutrits.
inline std::vector<double> qutrit_decay(int N, double gamma, bool edge_lossless) {
  if (!edge_lossless) return {gamma};
  std::vector<double> g(static_cast<std::size_t>(N), gamma);
  g.front() = 0.0;
  g.back() = 0.0;
  return g;
}

/// Final GHZ fidelity over the (gamma, kappa) grid.
inline SweepResult loss_sweep(const ChainSpec& spec, const std::vector<double>& gammas, const std::vector<double>& kappas,
                              bool edge_lossless = false, const EvolveOptions& opt = {}) {
  validate(spec);
  const std::size_t n = gammas.size() * kappas.size();
  std::vector<double> values(n);
  const auto none = DisorderRealization::none(spec.N);
  parallel_for(n, [&](std::size_t job) {
    ChainSpec s = spec;
    s.gamma = qutrit_decay(spec.N, gammas[job / kappas.size()], edge_lossless);
    s.kappa = {kappas[job % kappas.size()]};
    validate(s);
    values[job] = ghz_final_fidelity(s, none, !s.lossless(), opt);
  });
  SweepResult r;
  r.axes = {"gamma", "kappa"};
  r.spec_hash = spec_hash(spec);
  r.seed = spec.seed;
  for (std::size_t j = 0; j < n; ++j)
    r.points.push_back(summarize({gammas[j / kappas.size()], kappas[j % kappas.size()]}, {values[j]}));
  return r;
}

// ---------------------------------------------------------------------------
// Scale study

struct ScaleStudyConfig {
  double g0_physical = 2.0 * std::numbers::pi * 50e6;  // rad/s
  double tau_a = 1e-3;                                   // qutrit coherence time, s
  double tau_b = 1e-3;                                   // resonator coherence time, s
  std::vector<int> Ns;

  static ScaleStudyConfig at_mhz(double f_mhz, double tau_a, double tau_b, std::vector<int> Ns) {
    return {2.0 * std::numbers::pi * f_mhz * 1e6, tau_a, tau_b, std::move(Ns)};
  }

  /// Decay rates in units of g0; an infinite coherence time gives zero.
  double gamma() const { return std::isinf(tau_a) ? 0.0 : 1.0 / (tau_a * g0_physical); }
  double kappa() const { return std::isinf(tau_b) ? 0.0 : 1.0 / (tau_b * g0_physical); }

  void check() const {
    if (!(g0_physical > 0.0)) throw ConfigError("g0_physical", "must be > 0");
    if (!(tau_a > 0.0)) throw ConfigError("tau_a", "must be > 0");
    if (!(tau_b > 0.0)) throw ConfigError("tau_b", "must be > 0");
    for (int n : Ns)
      if (n < 2) throw ConfigError("N", "must be >= 2");
  }
};

inline ChainSpec scale_study_spec(const ScaleStudyConfig& cfg, Scheme scheme, int N, const ChainSpec& base = {}) {
  ChainSpec s = base;
  s.N = N;
  s.scheme = scheme;
  s.T = fitted_threshold_time(N);
  s.tau.reset();
  s.gamma = {cfg.gamma()};
  s.kappa = {cfg.kappa()};
  s.disorder_delta = 0.0;
  return s;
}

inline double scale_study_fidelity(const ScaleStudyConfig& cfg, Scheme scheme, int N, const EvolveOptions& opt = {}) {
  const auto s = scale_study_spec(cfg, scheme, N);
  validate(s);
  return ghz_final_fidelity(s, DisorderRealization::none(N), !s.lossless(), opt);
}

inline SweepResult scale_study(const ScaleStudyConfig& cfg, Scheme scheme, const EvolveOptions& opt = {}) {
  cfg.check();
  std::vector<double> values(cfg.Ns.size());
  parallel_for(values.size(), [&](std::size_t i) { values[i] = scale_study_fidelity(cfg, scheme, cfg.Ns[i], opt); });
  SweepResult r;
  r.axes = {"N"};
  r.spec_hash = spec_hash(scale_study_spec(cfg, scheme, cfg.Ns.empty() ? 2 : cfg.Ns.front()));
  for (std::size_t i = 0; i < values.size(); ++i) r.points.push_back(summarize({static_cast<double>(cfg.Ns[i])}, {values[i]}));
  return r;
}

/// Largest N in [n_lo, n_hi] with F(N) > level, by bisection (F decreasing in N).
/// Returns n_lo - 1 when even n_lo misses the level.
inline int largest_n_above(const ScaleStudyConfig& cfg, Scheme scheme, double level, int n_lo, int n_hi,
                           const EvolveOptions& opt = {}) {
  cfg.check();
  if (n_lo < 2 || n_hi < n_lo) throw std::invalid_argument("largest_n_above: bad bracket");
  if (scale_study_fidelity(cfg, scheme, n_lo, opt) <= level) return n_lo - 1;
  if (scale_study_fidelity(cfg, scheme, n_hi, opt) > level) return n_hi;
  int good = n_lo, bad = n_hi;
  while (bad - good > 1) {
    const int mid = good + (bad - good) / 2;
    (scale_study_fidelity(cfg, scheme, mid, opt) > level ? good : bad) = mid;
  }
  return good;
}

}  // namespace ghzchain
