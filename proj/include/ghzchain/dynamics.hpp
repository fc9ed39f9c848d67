#pragma once

// GHZ initial and target states, state-vector time evolution under the
// (possibly non-Hermitian) subspace Hamiltonian, and observables.
//
// For a pure initial state, integrating i psi' = H_cond psi and forming
// rho = |psi><psi| (unnormalized) reproduces the trace-decreasing Liouville
// evolution rho' = -i(H_cond rho - rho H_cond^dagger) exactly.

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "ghzchain/core_model.hpp"
#include "ghzchain/integrator.hpp"

namespace ghzchain {

/// Amplitudes over the subspace basis plus the decoupled |G> component.
struct StateVector {
  std::vector<cplx> amplitudes;
  cplx decoupled{0.0, 0.0};

  std::size_t dimension() const { return amplitudes.size(); }

  double norm() const {
    double s = std::norm(decoupled);
    for (const auto& a : amplitudes) s += std::norm(a);
    return std::sqrt(s);
  }

  /// <this|other>
  cplx overlap(const StateVector& other) const {
    if (other.amplitudes.size() != amplitudes.size()) throw std::invalid_argument("overlap: dimension mismatch");
    cplx s = std::conj(decoupled) * other.decoupled;
    for (std::size_t i = 0; i < amplitudes.size(); ++i) s += std::conj(amplitudes[i]) * other.amplitudes[i];
    return s;
  }

  static StateVector basis(std::size_t dim, std::size_t index) {
    StateVector v;
    v.amplitudes.assign(dim, cplx(0.0, 0.0));
    v.amplitudes.at(index) = 1.0;
    return v;
  }
  static StateVector ground(std::size_t dim) {
    StateVector v;
    v.amplitudes.assign(dim, cplx(0.0, 0.0));
    v.decoupled = 1.0;
    return v;
  }
};

inline StateVector left_edge_state(const ChainSpec& spec) {
  return StateVector::basis(static_cast<std::size_t>(spec.dimension()), 0);
}

inline StateVector right_edge_state(const ChainSpec& spec) {
  const auto d = static_cast<std::size_t>(spec.dimension());
  return StateVector::basis(d, d - 1);
}

/// (|G> + |l>)/sqrt(2) with |l> = e@A1 (scheme A) or P@A1 (schemes B, C).
inline StateVector ghz_initial_state(const ChainSpec& spec) {
  StateVector v = left_edge_state(spec);
  const double h = 1.0 / std::sqrt(2.0);
  v.amplitudes.front() = h;
  v.decoupled = h;
  return v;
}

/// Sign carried by the right-edge component after an adiabatic transfer:
/// -(-1)^N for schemes A and B, +(-1)^N for scheme C.
inline double transfer_sign(const ChainSpec& spec) {
  const double parity = (spec.N % 2 == 0) ? 1.0 : -1.0;
  return spec.scheme == Scheme::C ? parity : -parity;
}

inline StateVector ideal_ghz_state(const ChainSpec& spec) {
  StateVector v = right_edge_state(spec);
  const double h = 1.0 / std::sqrt(2.0);
  v.amplitudes.back() = transfer_sign(spec) * h;
  v.decoupled = h;
  return v;
}

inline std::vector<double> uniform_grid(double T, std::size_t points) {
  if (points < 2) throw std::invalid_argument("uniform_grid: need at least 2 points");
  std::vector<double> g(points);
  for (std::size_t i = 0; i < points; ++i) g[i] = T * static_cast<double>(i) / static_cast<double>(points - 1);
  g.back() = T;
  return g;
}

struct EvolveOptions {
  /// Largest substep is step_factor / (spectral bound of H over the pulse).
  double step_factor = 0.05;
  /// Explicit maximal substep; overrides step_factor when > 0.
  double max_step = 0.0;
  /// Extra factor on step_factor for scheme B, whose edge detunings dominate the bound.
  double detuned_step_scale = 0.25;
  bool keep_snapshots = true;
};

struct EvolutionTrace {
  std::vector<double> times;
  std::vector<StateVector> snapshots;  // empty except the last when snapshots are off
  std::vector<double> norms;
  std::map<std::string, std::vector<double>> curves;
  double step = 0.0;

  const StateVector& final_state() const { return snapshots.back(); }
};

namespace detail {

inline void check_grid(const std::vector<double>& grid) {
  if (grid.size() < 2) throw std::invalid_argument("time grid needs at least two samples");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw std::invalid_argument("time grid must be strictly increasing");
}

}  // namespace detail

namespace detail {

template <class Stepper, class Source>
EvolutionTrace run_stepper(Stepper& stepper, const Source& source, const StateVector& psi0,
                           const std::vector<double>& grid, double max_step, bool keep_snapshots) {
  check_grid(grid);
  if (!(max_step > 0.0)) throw std::invalid_argument("evolve: step must be positive");
  EvolutionTrace tr;
  tr.times = grid;
  tr.step = max_step;
  std::vector<cplx> psi = psi0.amplitudes;
  auto record = [&](bool force) {
    StateVector s{psi, psi0.decoupled};
    tr.norms.push_back(s.norm());
    if (keep_snapshots || force) tr.snapshots.push_back(std::move(s));
  };
  record(grid.size() == 1);
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    const double h = grid[k + 1] - grid[k];
    const auto n = static_cast<std::size_t>(std::ceil(h / max_step - 1e-9));
    stepper.advance(source, psi, grid[k], h, std::max<std::size_t>(n, 1));
    if (!all_finite(psi))
      throw NumericalError("evolve: non-finite amplitude at t = " + std::to_string(grid[k + 1]) +
                           " (step " + std::to_string(max_step) + ")");
    record(k + 2 == grid.size());
  }
  return tr;
}

}  // namespace detail

/// Integrates psi0 over `grid` under the operator produced by `source`. The
/// decoupled amplitude is carried unchanged.
template <LinearOperator Op, class Source>
  requires OperatorSource<Source, Op>
EvolutionTrace evolve_with(const Source& source, const StateVector& psi0, const std::vector<double>& grid,
                           double max_step, bool keep_snapshots) {
  Rk4Stepper<Op> stepper(psi0.amplitudes.size());
  return detail::run_stepper(stepper, source, psi0, grid, max_step, keep_snapshots);
}

/// As evolve_with, with the constant diagonal `frame` integrated exactly; the
/// source supplies H(t) - diag(frame).
template <LinearOperator Op, class Source>
  requires OperatorSource<Source, Op>
EvolutionTrace evolve_in_frame(const Source& source, std::vector<cplx> frame, const StateVector& psi0,
                               const std::vector<double>& grid, double max_step, bool keep_snapshots) {
  if (frame.size() != psi0.amplitudes.size()) throw std::invalid_argument("evolve: frame dimension mismatch");
  LawsonRk4Stepper<Op> stepper(std::move(frame));
  return detail::run_stepper(stepper, source, psi0, grid, max_step, keep_snapshots);
}

/// Time-independent diagonal of H: the scheme B edge detunings plus decay.
inline std::vector<cplx> static_diagonal(const ChainSpec& spec, const SubspaceBasis& basis, bool lossy) {
  std::vector<cplx> d(basis.size(), cplx(0.0, 0.0));
  if (spec.scheme == Scheme::B) {
    d[1] += spec.delta1 * spec.g0;
    d[d.size() - 2] += spec.delta2 * spec.g0;
  }
  if (lossy) add_losses(spec, basis, d);
  return d;
}

/// Default substep for a spec: step_factor over the largest Gershgorin bound of
/// H(t) sampled across the pulse.
inline double default_step(const ChainSpec& spec, const SubspaceBasis& basis, const DisorderRealization& r, bool lossy,
                           const EvolveOptions& opt) {
  if (opt.max_step > 0.0) return opt.max_step;
  double bound = 0.0;
  HamiltonianMatrix h;
  constexpr int samples = 64;
  for (int i = 0; i <= samples; ++i) {
    hamiltonian_into(spec, basis, r, spec.T * i / samples, lossy, h);
    bound = std::max(bound, gershgorin_bound(h));
  }
  // couplings never exceed g0 (times the disorder and edge scales) so a sampled
  // maximum is tight; guard against the all-zero chain
  bound = std::max(bound, 1e-3 * spec.g0);
  const double factor = spec.scheme == Scheme::B ? opt.step_factor * opt.detuned_step_scale : opt.step_factor;
  return factor / bound;
}

/// Scheme B runs in the frame of its static detunings; A and C use plain RK4.
inline EvolutionTrace evolve(const ChainSpec& spec, const DisorderRealization& realization, const StateVector& psi0,
                             const std::vector<double>& grid, bool lossy, const EvolveOptions& opt = {}) {
  const auto basis = build_subspace_basis(spec);
  if (psi0.dimension() != basis.size()) throw std::invalid_argument("evolve: initial state dimension mismatch");
  const double step = default_step(spec, basis, realization, lossy, opt);
  if (spec.scheme != Scheme::B) {
    auto source = [&](double t, HamiltonianMatrix& h) { hamiltonian_into(spec, basis, realization, t, lossy, h); };
    return evolve_with<HamiltonianMatrix>(source, psi0, grid, step, opt.keep_snapshots);
  }
  const auto frame = static_diagonal(spec, basis, lossy);
  auto source = [&](double t, HamiltonianMatrix& h) {
    hamiltonian_into(spec, basis, realization, t, lossy, h);
    for (std::size_t i = 0; i < frame.size(); ++i) h.diagonal[i] -= frame[i];
  };
  return evolve_in_frame<HamiltonianMatrix>(source, frame, psi0, grid, step, opt.keep_snapshots);
}

/// F(t) = |<target|psi(t)>|^2 with psi unnormalized.
inline std::vector<double> fidelity(const EvolutionTrace& trace, const StateVector& target) {
  std::vector<double> f;
  f.reserve(trace.snapshots.size());
  for (const auto& s : trace.snapshots) f.push_back(std::norm(target.overlap(s)));
  return f;
}

inline double final_fidelity(const EvolutionTrace& trace, const StateVector& target) {
  return std::norm(target.overlap(trace.final_state()));
}

/// Resolves a named state: "G", "l", "r", "initial", "ideal", a basis label
/// such as "e@A3" / "ph@B2" / "P@A1" / "target@A5", or "site:<k>" (0-based).
inline StateVector named_state(const ChainSpec& spec, const std::string& name) {
  const auto d = static_cast<std::size_t>(spec.dimension());
  if (name == "G") return StateVector::ground(d);
  if (name == "l") return left_edge_state(spec);
  if (name == "r") return right_edge_state(spec);
  if (name == "initial") return ghz_initial_state(spec);
  if (name == "ideal") return ideal_ghz_state(spec);
  if (name.rfind("site:", 0) == 0) {
    std::size_t k = 0;
    try {
      k = std::stoul(name.substr(5));
    } catch (const std::exception&) {
      throw std::invalid_argument("unknown projector '" + name + "'");
    }
    if (k >= d) throw std::invalid_argument("unknown projector '" + name + "': index out of range");
    return StateVector::basis(d, k);
  }
  const auto basis = build_subspace_basis(spec);
  for (std::size_t i = 0; i < basis.size(); ++i)
    if (basis.labels[i].to_string() == name) return StateVector::basis(d, i);
  throw std::invalid_argument("unknown projector '" + name + "'");
}

inline std::map<std::string, std::vector<double>> populations(const ChainSpec& spec, const EvolutionTrace& trace,
                                                              const std::vector<std::string>& names) {
  std::map<std::string, std::vector<double>> out;
  for (const auto& n : names) out[n] = fidelity(trace, named_state(spec, n));
  return out;
}

/// Convenience: the GHZ protocol from ghz_initial_state with fidelity against
/// ideal_ghz_state at the end of the pulse.
inline double ghz_final_fidelity(const ChainSpec& spec, const DisorderRealization& realization, bool lossy,
                                 const EvolveOptions& opt = {}) {
  EvolveOptions o = opt;
  o.keep_snapshots = false;
  const auto tr = evolve(spec, realization, ghz_initial_state(spec), {0.0, spec.T}, lossy, o);
  return final_fidelity(tr, ideal_ghz_state(spec));
}

}  // namespace ghzchain
