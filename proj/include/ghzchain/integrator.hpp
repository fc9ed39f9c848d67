#pragma once

// Fixed-step classical Runge-Kutta for i d(psi)/dt = H(t) psi, generic over the
// operator representation. A source is any callable `source(t, op)` that fills
// `op` with H(t); `op.apply(in, out)` computes out = H in.

#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include "ghzchain/core_model.hpp"

namespace ghzchain {

template <class Op>
concept LinearOperator = requires(const Op& op, std::span<const cplx> in, std::span<cplx> out) {
  op.apply(in, out);
  { op.dimension() } -> std::convertible_to<std::size_t>;
};

template <class Source, class Op>
concept OperatorSource = LinearOperator<Op> && requires(const Source& s, double t, Op& op) { s(t, op); };

template <LinearOperator Op>
class Rk4Stepper {
 public:
  explicit Rk4Stepper(std::size_t dim) : k1_(dim), k2_(dim), k3_(dim), k4_(dim), tmp_(dim) {}

  /// Advances psi from t to t + h in `steps` equal substeps.
  template <class Source>
    requires OperatorSource<Source, Op>
  void advance(const Source& source, std::vector<cplx>& psi, double t, double h, std::size_t steps) {
    const double dt = h / static_cast<double>(steps);
    const std::size_t d = psi.size();
    const cplx mi(0.0, -1.0);
    for (std::size_t s = 0; s < steps; ++s) {
      const double t0 = t + dt * static_cast<double>(s);
      source(t0, op_);
      op_.apply(psi, k1_);
      source(t0 + 0.5 * dt, op_);
      for (std::size_t i = 0; i < d; ++i) tmp_[i] = psi[i] + (0.5 * dt) * mi * k1_[i];
      op_.apply(tmp_, k2_);
      for (std::size_t i = 0; i < d; ++i) tmp_[i] = psi[i] + (0.5 * dt) * mi * k2_[i];
      op_.apply(tmp_, k3_);
      source(t0 + dt, op_);
      for (std::size_t i = 0; i < d; ++i) tmp_[i] = psi[i] + dt * mi * k3_[i];
      op_.apply(tmp_, k4_);
      for (std::size_t i = 0; i < d; ++i)
        psi[i] += (dt / 6.0) * mi * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
    }
  }

 private:
  Op op_;
  std::vector<cplx> k1_, k2_, k3_, k4_, tmp_;
};

/// Integrating-factor (Lawson) RK4 for i psi' = (D + V(t)) psi with a constant
/// diagonal D applied exactly. The source fills V(t) only.
template <LinearOperator Op>
class LawsonRk4Stepper {
 public:
  explicit LawsonRk4Stepper(std::vector<cplx> diagonal)
      : d_(std::move(diagonal)), full_(d_.size()), half_(d_.size()), k1_(d_.size()), k2_(d_.size()),
        k3_(d_.size()), k4_(d_.size()), tmp_(d_.size()) {}

  template <class Source>
    requires OperatorSource<Source, Op>
  void advance(const Source& source, std::vector<cplx>& psi, double t, double h, std::size_t steps) {
    const double dt = h / static_cast<double>(steps);
    if (dt != cached_dt_) {
      for (std::size_t i = 0; i < d_.size(); ++i) {
        full_[i] = std::exp(cplx(0.0, -dt) * d_[i]);
        half_[i] = std::exp(cplx(0.0, -0.5 * dt) * d_[i]);
      }
      cached_dt_ = dt;
    }
    const std::size_t d = psi.size();
    const cplx mi(0.0, -1.0);
    auto rhs = [&](std::vector<cplx>& k) {
      op_.apply(tmp_, k);
      for (auto& z : k) z *= mi;
    };
    for (std::size_t s = 0; s < steps; ++s) {
      const double t0 = t + dt * static_cast<double>(s);
      source(t0, op_);
      tmp_ = psi;
      rhs(k1_);
      source(t0 + 0.5 * dt, op_);
      for (std::size_t i = 0; i < d; ++i) tmp_[i] = half_[i] * (psi[i] + (0.5 * dt) * k1_[i]);
      rhs(k2_);
      for (std::size_t i = 0; i < d; ++i) tmp_[i] = half_[i] * psi[i] + (0.5 * dt) * k2_[i];
      rhs(k3_);
      source(t0 + dt, op_);
      for (std::size_t i = 0; i < d; ++i) tmp_[i] = full_[i] * psi[i] + dt * half_[i] * k3_[i];
      rhs(k4_);
      for (std::size_t i = 0; i < d; ++i)
        psi[i] = full_[i] * psi[i] +
                 (dt / 6.0) * (full_[i] * k1_[i] + 2.0 * half_[i] * (k2_[i] + k3_[i]) + k4_[i]);
    }
  }

 private:
  Op op_;
  std::vector<cplx> d_, full_, half_, k1_, k2_, k3_, k4_, tmp_;
  double cached_dt_ = 0.0;
};

/// Gershgorin bound on the spectral radius of a tridiagonal-like operator.
inline double gershgorin_bound(const HamiltonianMatrix& h) {
  double best = 0.0;
  const std::size_t d = h.dimension();
  for (std::size_t i = 0; i < d; ++i) {
    double r = std::abs(h.diagonal[i]);
    if (i > 0) r += std::abs(h.bonds[i - 1]);
    if (i + 1 < d) r += std::abs(h.bonds[i]);
    best = std::max(best, r);
  }
  return best;
}

inline bool all_finite(std::span<const cplx> v) {
  for (const auto& z : v)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

}  // namespace ghzchain
