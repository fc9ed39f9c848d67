#pragma once

// Instantaneous eigenanalysis of the lossless chain: spectra, zero-mode
// selection and tracking, the closed-form edge state, gap, winding number and
// adiabaticity margin.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "ghzchain/core_model.hpp"

namespace ghzchain {

struct SpectrumResult {
  Eigen::VectorXd eigenvalues;   // ascending
  Eigen::MatrixXd eigenvectors;  // columns
  std::size_t zero_mode_index = 0;

  double zero_energy() const { return eigenvalues(static_cast<Eigen::Index>(zero_mode_index)); }
  Eigen::VectorXd zero_mode() const { return eigenvectors.col(static_cast<Eigen::Index>(zero_mode_index)); }
};

/// Near-degeneracy window used when choosing the zero mode. Scheme B keeps an
/// exact resonator-supported zero mode next to the (nearly zero) transfer mode,
/// so the window there spans both and the sublattice weight decides.
inline double zero_mode_window(Scheme s, double g0 = 1.0) { return s == Scheme::B ? 0.1 * g0 : 1e-8 * g0; }

/// Eigendecomposition of a lossless tridiagonal H. Among eigenvalues within
/// `window` of the smallest |E|, the zero mode is the one with the largest
/// weight on `sublattice`.
inline SpectrumResult instantaneous_spectrum(const HamiltonianMatrix& h, const std::vector<bool>& sublattice,
                                             double window = 1e-8) {
  const auto d = static_cast<Eigen::Index>(h.dimension());
  if (!h.is_hermitian()) throw std::invalid_argument("instantaneous_spectrum: Hamiltonian must be lossless");
  if (sublattice.size() != h.dimension()) throw std::invalid_argument("instantaneous_spectrum: sublattice size");
  Eigen::VectorXd diag(d);
  Eigen::VectorXd sub(std::max<Eigen::Index>(d - 1, 0));
  for (Eigen::Index i = 0; i < d; ++i) diag(i) = h.diagonal[static_cast<std::size_t>(i)].real();
  for (Eigen::Index i = 0; i + 1 < d; ++i) sub(i) = h.bonds[static_cast<std::size_t>(i)];

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success) throw NumericalError("instantaneous_spectrum: eigensolver did not converge");

  SpectrumResult r{es.eigenvalues(), es.eigenvectors(), 0};
  double emin = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < d; ++k) emin = std::min(emin, std::abs(r.eigenvalues(k)));
  double best = -1.0;
  for (Eigen::Index k = 0; k < d; ++k) {
    if (std::abs(r.eigenvalues(k)) > emin + window) continue;
    double w = 0.0;
    for (Eigen::Index i = 0; i < d; ++i)
      if (sublattice[static_cast<std::size_t>(i)]) w += r.eigenvectors(i, k) * r.eigenvectors(i, k);
    if (w > best) {
      best = w;
      r.zero_mode_index = static_cast<std::size_t>(k);
    }
  }
  return r;
}

/// Scheme A default: even basis indices (qutrit excitations) form the zero-mode sublattice.
inline SpectrumResult instantaneous_spectrum(const HamiltonianMatrix& h) {
  std::vector<bool> sub(h.dimension());
  for (std::size_t i = 0; i < sub.size(); ++i) sub[i] = (i % 2 == 0);
  return instantaneous_spectrum(h, sub);
}

inline SpectrumResult instantaneous_spectrum(const HamiltonianMatrix& h, const SubspaceBasis& basis, double g0 = 1.0) {
  return instantaneous_spectrum(h, basis.zero_mode_sublattice(), zero_mode_window(basis.scheme, g0));
}

/// Closed-form edge state sum_n lambda^n |e@A_n> with lambda = -J1/J2 (gamma = 1, eta = 0).
struct AnalyticEdgeState {
  double lambda = 0.0;
  std::vector<double> amplitudes;  // over qutrit sites A_1..A_N, normalized
  double gamma = 1.0;
  double eta = 0.0;

  /// Embeds into the scheme A basis (zero on resonator sites).
  Eigen::VectorXd embedded() const {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(2 * amplitudes.size() - 1));
    for (std::size_t n = 0; n < amplitudes.size(); ++n) v(static_cast<Eigen::Index>(2 * n)) = amplitudes[n];
    return v;
  }
  bool left_localized() const { return std::abs(lambda) < 1.0; }
};

inline AnalyticEdgeState analytic_edge_state(double J1, double J2, int N) {
  if (J2 == 0.0) throw std::invalid_argument("analytic_edge_state: J2 = 0 leaves lambda undefined");
  if (N < 1) throw std::invalid_argument("analytic_edge_state: N must be positive");
  AnalyticEdgeState s;
  s.lambda = -J1 / J2;
  const double lam = s.lambda;
  s.amplitudes.resize(static_cast<std::size_t>(N));
  if (lam == 0.0) {
    s.amplitudes.assign(s.amplitudes.size(), 0.0);
    s.amplitudes[0] = 1.0;
    return s;
  }
  // lambda^n rescaled by a positive constant to avoid overflow
  const double sgn = lam < 0.0 ? -1.0 : 1.0;
  for (int n = 1; n <= N; ++n) {
    double a;
    if (std::abs(lam) <= 1.0)
      a = sgn * std::pow(lam, n - 1);
    else
      a = std::pow(sgn, N) * std::pow(lam, n - N);
    s.amplitudes[static_cast<std::size_t>(n - 1)] = a;
  }
  double norm = 0.0;
  for (double a : s.amplitudes) norm += a * a;
  norm = std::sqrt(norm);
  for (double& a : s.amplitudes) a /= norm;
  return s;
}

inline std::vector<SpectrumResult> spectral_flow(const ChainSpec& spec, const std::vector<double>& grid) {
  const auto basis = build_subspace_basis(spec);
  const auto none = DisorderRealization::none(spec.N);
  std::vector<SpectrumResult> out;
  out.reserve(grid.size());
  HamiltonianMatrix h;
  for (double t : grid) {
    hamiltonian_into(spec, basis, none, t, false, h);
    out.push_back(instantaneous_spectrum(h, basis, spec.g0));
  }
  return out;
}

/// Squared amplitudes of the tracked zero mode over basis sites, one row per time.
inline std::vector<std::vector<double>> zero_mode_distribution(const ChainSpec& spec, const std::vector<double>& grid) {
  std::vector<std::vector<double>> rows;
  rows.reserve(grid.size());
  for (const auto& sr : spectral_flow(spec, grid)) {
    const Eigen::VectorXd v = sr.zero_mode();
    std::vector<double> row(static_cast<std::size_t>(v.size()));
    double s = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) s += row[static_cast<std::size_t>(i)] = v(i) * v(i);
    for (double& p : row) p /= s;
    rows.push_back(std::move(row));
  }
  return rows;
}

inline double energy_gap(const SpectrumResult& sr) {
  double gap = std::numeric_limits<double>::infinity();
  const double ez = sr.zero_energy();
  for (Eigen::Index k = 0; k < sr.eigenvalues.size(); ++k)
    if (static_cast<std::size_t>(k) != sr.zero_mode_index) gap = std::min(gap, std::abs(sr.eigenvalues(k) - ez));
  return gap;
}

inline double energy_gap(const HamiltonianMatrix& h) { return energy_gap(instantaneous_spectrum(h)); }

/// |d theta/dt| / gap with theta = arctan(J1/J2) of the bulk bonds; d theta/dt by
/// central differences with step 1e-4 T.
inline std::vector<double> adiabaticity_margin(const ChainSpec& spec, const std::vector<double>& grid) {
  const auto basis = build_subspace_basis(spec);
  const auto none = DisorderRealization::none(spec.N);
  const double h = 1e-4 * spec.T;
  auto theta = [&](double t) {
    const auto d = eval_drives(spec, t);
    return std::atan2(d.intra, d.inter);
  };
  std::vector<double> out;
  out.reserve(grid.size());
  HamiltonianMatrix H;
  for (double t : grid) {
    const double rate = std::abs(theta(t + h) - theta(t - h)) / (2.0 * h);
    hamiltonian_into(spec, basis, none, t, false, H);
    const double gap = energy_gap(instantaneous_spectrum(H, basis, spec.g0));
    out.push_back(rate == 0.0 ? 0.0 : rate / gap);
  }
  return out;
}

/// Winding of the bulk off-diagonal h(k) = J1 + J2 e^{ik} around the origin,
/// from a discretized contour integral of d arg h / dk over [0, 2 pi).
inline int winding_number(double J1, double J2) {
  const double scale = std::max(std::abs(J1), std::abs(J2));
  if (std::abs(J1 - J2) <= 1e-12 * scale) throw std::domain_error("winding_number: gap closed (J1 == J2)");
  constexpr int samples = 2048;
  double total = 0.0;
  double prev = std::arg(cplx(J1 + J2, 0.0));
  for (int k = 1; k <= samples; ++k) {
    const double kk = 2.0 * std::numbers::pi * k / samples;
    const double a = std::arg(cplx(J1, 0.0) + J2 * std::polar(1.0, -kk));
    double da = a - prev;
    while (da > std::numbers::pi) da -= 2.0 * std::numbers::pi;
    while (da < -std::numbers::pi) da += 2.0 * std::numbers::pi;
    total += da;
    prev = a;
  }
  // e^{-ik} runs clockwise; report the counterclockwise count
  return static_cast<int>(std::lround(-total / (2.0 * std::numbers::pi)));
}

}  // namespace ghzchain
