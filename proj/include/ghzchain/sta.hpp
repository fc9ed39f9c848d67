#pragma once

// Counterdiabatic control for the scheme A transfer. The control is the gauge
// potential of the instantaneous zero mode phi(t),
//   H_c = i (|d phi><phi| - |phi><d phi|),
// which keeps a state that starts in phi(0) on phi(t) at any speed. It lives on
// the qutrit sublattice only. The truncated variant keeps the A_n - A_{n+1}
// elements alone.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "ghzchain/core_model.hpp"
#include "ghzchain/dynamics.hpp"
#include "ghzchain/integrator.hpp"
#include "ghzchain/spectral.hpp"

namespace ghzchain {

enum class ControlMode { FullRank, NnnTruncated };

inline const char* control_mode_name(ControlMode m) { return m == ControlMode::FullRank ? "full_rank" : "nnn_truncated"; }

inline ControlMode parse_control_mode(const std::string& s) {
  if (s == "full_rank") return ControlMode::FullRank;
  if (s == "nnn_truncated") return ControlMode::NnnTruncated;
  throw ConfigError("mode", "expected full_rank or nnn_truncated, got '" + s + "'");
}

/// H_c = i K on the qutrit sites, K real antisymmetric (N x N).
struct ControlField {
  ControlMode mode = ControlMode::FullRank;
  Eigen::MatrixXd K;
  /// alpha_n = <A_{n+1}| K |A_n>, n = 1..N-1.
  std::vector<double> alpha() const {
    std::vector<double> a;
    for (Eigen::Index n = 0; n + 1 < K.rows(); ++n) a.push_back(K(n + 1, n));
    return a;
  }
};

namespace sta_detail {

inline void require_scheme_a(const ChainSpec& spec) {
  if (spec.scheme != Scheme::A) throw std::invalid_argument("counterdiabatic control is defined for scheme A only");
  if (spec.disorder_delta != 0.0) throw std::invalid_argument("counterdiabatic control needs a disorder-free chain");
}

}  // namespace sta_detail

/// Control for an arbitrary coupling schedule `couplings(t) -> Couplings`;
/// d phi/dt by central differences with step h. Throws when J2(t) = 0.
template <class Schedule>
ControlField counterdiabatic_control(const Schedule& couplings, int N, double t, ControlMode mode, double h) {
  auto phi_at = [&](double s) {
    const auto c = couplings(s);
    const auto e = analytic_edge_state(c.J1, c.J2, N);
    return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(e.amplitudes.data(), N));
  };
  const Eigen::VectorXd phi = phi_at(t);
  const Eigen::VectorXd dphi = (phi_at(t + h) - phi_at(t - h)) / (2.0 * h);
  ControlField f;
  f.mode = mode;
  f.K = dphi * phi.transpose() - phi * dphi.transpose();
  if (mode == ControlMode::NnnTruncated) {
    for (Eigen::Index i = 0; i < N; ++i)
      for (Eigen::Index j = 0; j < N; ++j)
        if (std::abs(i - j) != 1) f.K(i, j) = 0.0;
  }
  return f;
}

/// Control at time t for the spec's pulses, with derivative step 1e-6 tau.
inline ControlField counterdiabatic_control(const ChainSpec& spec, double t, ControlMode mode) {
  sta_detail::require_scheme_a(spec);
  const auto profile = CouplingProfile::from(spec);
  return counterdiabatic_control([&](double s) { return eval_couplings(profile, s); }, spec.N, t, mode,
                                 1e-6 * spec.pulse_width());
}

/// Embeds H_c into the scheme A basis (qutrit A_n at index 2(n-1)).
inline Eigen::MatrixXcd control_matrix(const ControlField& f) {
  const Eigen::Index N = f.K.rows();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2 * N - 1, 2 * N - 1);
  for (Eigen::Index i = 0; i < N; ++i)
    for (Eigen::Index j = 0; j < N; ++j) m(2 * i, 2 * j) = cplx(0.0, f.K(i, j));
  return m;
}

/// Tridiagonal H plus a scaled control on the qutrit sublattice.
struct ControlledHamiltonian {
  HamiltonianMatrix h;
  Eigen::MatrixXd K;
  double scale = 1.0;

  std::size_t dimension() const { return h.dimension(); }

  void apply(std::span<const cplx> in, std::span<cplx> out) const {
    h.apply(in, out);
    if (scale == 0.0) return;
    const Eigen::Index N = K.rows();
    for (Eigen::Index i = 0; i < N; ++i) {
      cplx acc(0.0, 0.0);
      for (Eigen::Index j = 0; j < N; ++j) acc += K(i, j) * in[static_cast<std::size_t>(2 * j)];
      out[static_cast<std::size_t>(2 * i)] += cplx(0.0, scale) * acc;
    }
  }
};

struct StaOptions {
  double alpha_scale = 1.0;
  double step_factor = 0.05;
  double max_step = 0.0;
  bool keep_snapshots = true;
};

/// Evolves psi0 (default: the left edge state) under H + alpha_scale * H_c.
inline EvolutionTrace evolve_with_sta(const ChainSpec& spec, ControlMode mode, const std::vector<double>& grid,
                                      const StaOptions& opt = {}, std::optional<StateVector> psi0 = std::nullopt) {
  sta_detail::require_scheme_a(spec);
  if (!spec.lossless()) throw std::invalid_argument("counterdiabatic control needs a lossless chain");
  const auto basis = build_subspace_basis(spec);
  const auto none = DisorderRealization::none(spec.N);
  const StateVector start = psi0 ? *psi0 : left_edge_state(spec);
  if (start.dimension() != basis.size()) throw std::invalid_argument("evolve_with_sta: initial state dimension mismatch");

  double step = opt.max_step;
  if (!(step > 0.0)) {
    double bound = 1e-3 * spec.g0;
    HamiltonianMatrix h;
    constexpr int samples = 256;
    for (int i = 0; i <= samples; ++i) {
      const double t = spec.T * i / samples;
      hamiltonian_into(spec, basis, none, t, false, h);
      double b = gershgorin_bound(h);
      if (opt.alpha_scale != 0.0)
        b += std::abs(opt.alpha_scale) * counterdiabatic_control(spec, t, mode).K.cwiseAbs().rowwise().sum().maxCoeff();
      bound = std::max(bound, b);
    }
    step = opt.step_factor / bound;
  }
  auto source = [&](double t, ControlledHamiltonian& op) {
    hamiltonian_into(spec, basis, none, t, false, op.h);
    op.scale = opt.alpha_scale;
    if (opt.alpha_scale != 0.0)
      op.K = counterdiabatic_control(spec, t, mode).K;
    else
      op.K.resize(0, 0);
  };
  return evolve_with<ControlledHamiltonian>(source, start, grid, step, opt.keep_snapshots);
}

/// |<r|psi(T)>|^2 after a left-to-right transfer with control.
inline double sta_transfer_fidelity(const ChainSpec& spec, ControlMode mode, const StaOptions& opt = {}) {
  StaOptions o = opt;
  o.keep_snapshots = false;
  const auto tr = evolve_with_sta(spec, mode, {0.0, spec.T}, o);
  return std::norm(tr.final_state().amplitudes.back());
}

}  // namespace ghzchain
