#pragma once

// Brute-force evolution in the full product space of small chains (N <= 4):
// every qutrit keeps all of its levels and every resonator is truncated at a
// photon cutoff. Used to certify the single-excitation construction.
//
// Basis ordering: mixed radix over (A_1, ..., A_N, B_1, ..., B_{N-1}) with A_1
// the most significant digit. Qutrit digits are L=0, R=1, e=2, P=3 (P only on
// A_1 for schemes B and C); resonator digits are the photon number.
//
// Scheme B is built with the explicit e^{i delta t} phases on the edge
// couplings rather than a static detuning.

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ghzchain/core_model.hpp"
#include "ghzchain/dynamics.hpp"

namespace ghzchain {

inline constexpr int kOracleMaxN = 4;

struct OracleLayout {
  int N = 0;
  Scheme scheme = Scheme::A;
  int cutoff = 1;
  std::vector<int> radix;  // per digit, most significant first

  static OracleLayout make(const ChainSpec& spec, int cutoff = 1) {
    if (spec.N > kOracleMaxN)
      throw std::invalid_argument("oracle: N = " + std::to_string(spec.N) + " exceeds " + std::to_string(kOracleMaxN));
    if (spec.N < 2) throw std::invalid_argument("oracle: N must be >= 2");
    if (cutoff < 1) throw std::invalid_argument("oracle: photon cutoff must be >= 1");
    OracleLayout l;
    l.N = spec.N;
    l.scheme = spec.scheme;
    l.cutoff = cutoff;
    for (int n = 1; n <= spec.N; ++n) l.radix.push_back(n == 1 && spec.scheme != Scheme::A ? 4 : 3);
    for (int n = 1; n < spec.N; ++n) l.radix.push_back(cutoff + 1);
    return l;
  }

  std::size_t dimension() const {
    std::size_t d = 1;
    for (int r : radix) d *= static_cast<std::size_t>(r);
    return d;
  }

  std::vector<int> digits(std::size_t index) const {
    std::vector<int> d(radix.size());
    for (std::size_t k = radix.size(); k-- > 0;) {
      d[k] = static_cast<int>(index % static_cast<std::size_t>(radix[k]));
      index /= static_cast<std::size_t>(radix[k]);
    }
    return d;
  }

  std::size_t index(const std::vector<int>& d) const {
    std::size_t i = 0;
    for (std::size_t k = 0; k < radix.size(); ++k) {
      if (d[k] < 0 || d[k] >= radix[k]) throw std::out_of_range("oracle: digit outside its range");
      i = i * static_cast<std::size_t>(radix[k]) + static_cast<std::size_t>(d[k]);
    }
    return i;
  }

  /// Position of a product state; throws when it cannot be represented.
  std::size_t index_of(const ProductState& s) const {
    if (static_cast<int>(s.qutrits.size()) != N || static_cast<int>(s.photons.size()) != N - 1)
      throw std::invalid_argument("oracle: product state has the wrong number of sites");
    std::vector<int> d;
    d.reserve(radix.size());
    for (Level l : s.qutrits) d.push_back(static_cast<int>(l));
    for (int p : s.photons) d.push_back(p);
    try {
      return index(d);
    } catch (const std::out_of_range&) {
      throw std::invalid_argument("oracle: cannot map " + s.to_string() + " into the full space");
    }
  }
};

struct FullState {
  std::vector<cplx> amplitudes;

  double norm() const {
    double s = 0.0;
    for (const auto& a : amplitudes) s += std::norm(a);
    return std::sqrt(s);
  }

  /// Superposition of product states with the given weights.
  static FullState from_products(const OracleLayout& layout, const std::vector<std::pair<ProductState, cplx>>& terms) {
    FullState f;
    f.amplitudes.assign(layout.dimension(), cplx(0.0, 0.0));
    for (const auto& [s, a] : terms) f.amplitudes[layout.index_of(s)] += a;
    return f;
  }
};

struct OracleOptions {
  double max_step = 1e-3;
  int cutoff = 1;
  bool keep_snapshots = true;
};

struct FullTrace {
  std::vector<double> times;
  std::vector<FullState> snapshots;
  std::vector<double> norms;
  std::vector<double> excitation;  // <N_exc>
  std::vector<double> leakage;     // weight outside the single-excitation states and |G>
  std::vector<double> boundary;    // weight on states with a transition truncated by the cutoff
};

namespace oracle_detail {

// Channels feeding time-dependent coefficients: the 2N-2 bonds, the two edge
// drives and a constant.
struct Term {
  std::size_t dst;
  std::size_t src;
  int channel;
  int power;   // coefficient is factor * amp[channel]^power
  int phase;   // 0, +-1 -> e^{+-i d1 t}, +-2 -> e^{+-i d2 t}
  cplx factor;
};

struct FullOperator {
  std::vector<Term> terms;
  std::vector<bool> truncated;  // per state: some outgoing transition left the cutoff
  int channels = 0;
};

inline double gauss(double t, double center, double width) {
  const double x = (t - center) / width;
  return std::exp(-x * x);
}

constexpr int kL = 0, kR = 1, kE = 2, kP = 3;

/// Ground level coupled to |e> by resonator B_n: L when n is odd.
inline int coupled_level(int n) { return n % 2 == 1 ? kL : kR; }

inline FullOperator build(const ChainSpec& spec, const OracleLayout& layout, bool lossy) {
  const int N = spec.N;
  const std::size_t dim = layout.dimension();
  const int cut = layout.cutoff;
  const int nb = 2 * N - 2;
  const int chLeft = nb, chRight = nb + 1, chConst = nb + 2;
  FullOperator op;
  op.channels = nb + 3;
  op.truncated.assign(dim, false);

  const double d1 = spec.delta1 * spec.g0;
  const double d2 = spec.delta2 * spec.g0;
  const bool b = spec.scheme == Scheme::B;
  const int m = coupled_level(N - 1);
  const int target = m == kL ? kR : kL;

  for (std::size_t s = 0; s < dim; ++s) {
    const auto dg = layout.digits(s);
    auto q = [&](int n) { return dg[static_cast<std::size_t>(n - 1)]; };
    auto ph = [&](int n) { return dg[static_cast<std::size_t>(N + n - 1)]; };

    // b_n |e><j|_site + h.c. on each qutrit-resonator bond
    for (int n = 1; n < N; ++n) {
      const int j = coupled_level(n);
      for (int side = 0; side < 2; ++side) {
        const int site = n + side;
        const int ch = 2 * (n - 1) + side;
        int phase = 0;
        if (b && site == 1) phase = 1;
        if (b && site == N) phase = 2;
        // annihilate a photon, excite the qutrit
        if (q(site) == j && ph(n) >= 1) {
          auto d = dg;
          d[static_cast<std::size_t>(site - 1)] = kE;
          d[static_cast<std::size_t>(N + n - 1)] -= 1;
          op.terms.push_back({layout.index(d), s, ch, 1, phase, std::sqrt(static_cast<double>(ph(n)))});
        }
        // de-excite the qutrit, create a photon
        if (q(site) == kE) {
          if (ph(n) + 1 > cut) {
            op.truncated[s] = true;
          } else {
            auto d = dg;
            d[static_cast<std::size_t>(site - 1)] = j;
            d[static_cast<std::size_t>(N + n - 1)] += 1;
            op.terms.push_back({layout.index(d), s, ch, 1, -phase, std::sqrt(static_cast<double>(ph(n) + 1))});
          }
        }
      }
    }

    if (spec.scheme != Scheme::A) {
      // left drive |e><P|_1, right drive |e><target|_N
      if (q(1) == kP || q(1) == kE) {
        auto d = dg;
        d[0] = q(1) == kP ? kE : kP;
        op.terms.push_back({layout.index(d), s, chLeft, 1, b ? (q(1) == kP ? 1 : -1) : 0, 1.0});
      }
      if (q(N) == target || q(N) == kE) {
        auto d = dg;
        d[static_cast<std::size_t>(N - 1)] = q(N) == target ? kE : target;
        op.terms.push_back({layout.index(d), s, chRight, 1, b ? (q(N) == target ? 2 : -2) : 0, 1.0});
      }
    }

    if (b && spec.stark_compensation) {
      // Omega^2/Delta |P><P|, J'^2/Delta |j><j| b^dag b on both edges, Omega^2/Delta |target><target|
      if (q(1) == kP) op.terms.push_back({s, s, chLeft, 2, 0, 1.0 / d1});
      if (q(1) == coupled_level(1) && ph(1) > 0) op.terms.push_back({s, s, 0, 2, 0, ph(1) / d1});
      if (q(N) == m && ph(N - 1) > 0) op.terms.push_back({s, s, nb - 1, 2, 0, ph(N - 1) / d2});
      if (q(N) == target) op.terms.push_back({s, s, chRight, 2, 0, 1.0 / d2});
    }

    if (lossy) {
      cplx loss(0.0, 0.0);
      for (int n = 1; n <= N; ++n)
        if (q(n) == kE) loss -= cplx(0.0, 0.5 * spec.gamma_at(n) * spec.g0);
      for (int n = 1; n < N; ++n) loss -= cplx(0.0, 0.5 * spec.kappa_at(n) * spec.g0 * ph(n));
      if (loss != cplx(0.0, 0.0)) op.terms.push_back({s, s, chConst, 1, 0, loss});
    }
  }
  return op;
}

/// Channel amplitudes at time t.
inline void channel_amplitudes(const ChainSpec& spec, const DisorderRealization& r, double t, std::vector<double>& amp) {
  const int N = spec.N;
  const int nb = 2 * N - 2;
  const double tau = spec.pulse_width();
  const double early = spec.g0 * gauss(t, 2.0 * tau, tau);
  const double late = spec.g0 * gauss(t, 3.0 * tau, tau);
  const bool c = spec.scheme == Scheme::C;
  const double intra = c ? early : late;
  const double inter = c ? late : early;
  amp.assign(static_cast<std::size_t>(nb + 3), 0.0);
  for (int k = 0; k < nb; ++k) amp[static_cast<std::size_t>(k)] = (k % 2 == 0 ? intra : inter) * r.multipliers[static_cast<std::size_t>(k)];
  if (spec.scheme == Scheme::B) {
    amp[0] *= spec.jprime_scale;
    amp[static_cast<std::size_t>(nb - 1)] *= spec.jprime_scale;
    amp[static_cast<std::size_t>(nb)] = spec.omega_edge * spec.g0;
    amp[static_cast<std::size_t>(nb + 1)] = spec.omega_edge * spec.g0;
  } else if (c) {
    amp[static_cast<std::size_t>(nb)] = late;
    amp[static_cast<std::size_t>(nb + 1)] = early;
  }
  amp[static_cast<std::size_t>(nb + 2)] = 1.0;
}

class Propagator {
 public:
  Propagator(const ChainSpec& spec, const DisorderRealization& r, const FullOperator& op)
      : spec_(spec), r_(r), op_(op), coef_(op.terms.size()) {}

  void set_time(double t) {
    channel_amplitudes(spec_, r_, t, amp_);
    const cplx p1 = std::polar(1.0, spec_.delta1 * spec_.g0 * t);
    const cplx p2 = std::polar(1.0, spec_.delta2 * spec_.g0 * t);
    for (std::size_t k = 0; k < op_.terms.size(); ++k) {
      const auto& tm = op_.terms[k];
      double a = amp_[static_cast<std::size_t>(tm.channel)];
      if (tm.power == 2) a *= a;
      cplx c = tm.factor * a;
      switch (tm.phase) {
        case 1: c *= p1; break;
        case -1: c *= std::conj(p1); break;
        case 2: c *= p2; break;
        case -2: c *= std::conj(p2); break;
        default: break;
      }
      coef_[k] = c;
    }
  }

  void apply(const std::vector<cplx>& in, std::vector<cplx>& out) const {
    std::fill(out.begin(), out.end(), cplx(0.0, 0.0));
    for (std::size_t k = 0; k < op_.terms.size(); ++k) out[op_.terms[k].dst] += coef_[k] * in[op_.terms[k].src];
  }

 private:
  const ChainSpec& spec_;
  const DisorderRealization& r_;
  const FullOperator& op_;
  std::vector<double> amp_;
  std::vector<cplx> coef_;
};

}  // namespace oracle_detail

/// Excitation number of a full-space basis state: photons plus |e> occupations,
/// plus |P> on A_1 and the post-transfer ground level of A_N for schemes B, C.
inline int excitation_number(const OracleLayout& layout, std::size_t index) {
  const auto d = layout.digits(index);
  const int N = layout.N;
  int n = 0;
  for (int k = 0; k < N; ++k)
    if (d[static_cast<std::size_t>(k)] == oracle_detail::kE) ++n;
  for (int k = 0; k + 1 < N; ++k) n += d[static_cast<std::size_t>(N + k)];
  if (layout.scheme != Scheme::A) {
    if (d[0] == oracle_detail::kP) ++n;
    const int m = oracle_detail::coupled_level(N - 1);
    if (d[static_cast<std::size_t>(N - 1)] == (m == oracle_detail::kL ? oracle_detail::kR : oracle_detail::kL)) ++n;
  }
  return n;
}

/// Full-space images of the subspace basis (in basis order) followed by |G>.
inline std::vector<std::size_t> subspace_images(const ChainSpec& spec, const OracleLayout& layout) {
  const auto basis = build_subspace_basis(spec);
  std::vector<std::size_t> idx;
  idx.reserve(basis.size() + 1);
  for (const auto& s : basis.states) idx.push_back(layout.index_of(s));
  idx.push_back(layout.index_of(decoupled_state(spec.N)));
  return idx;
}

inline FullTrace full_hilbert_evolve(const ChainSpec& spec, const DisorderRealization& realization,
                                     const FullState& psi0, const std::vector<double>& grid, bool lossy,
                                     const OracleOptions& opt = {}) {
  const auto layout = OracleLayout::make(spec, opt.cutoff);
  const std::size_t dim = layout.dimension();
  if (psi0.amplitudes.size() != dim) throw std::invalid_argument("oracle: initial state dimension mismatch");
  if (realization.multipliers.size() != static_cast<std::size_t>(2 * spec.N - 2))
    throw std::invalid_argument("oracle: disorder realization does not match N");
  if (!(opt.max_step > 0.0)) throw std::invalid_argument("oracle: step must be positive");
  if (grid.size() < 2) throw std::invalid_argument("oracle: time grid needs at least two samples");

  const auto op = oracle_detail::build(spec, layout, lossy);
  oracle_detail::Propagator prop(spec, realization, op);

  std::vector<bool> inside(dim, false);
  for (auto i : subspace_images(spec, layout)) inside[i] = true;
  std::vector<int> exc(dim);
  for (std::size_t i = 0; i < dim; ++i) exc[i] = excitation_number(layout, i);

  FullTrace tr;
  tr.times = grid;
  std::vector<cplx> psi = psi0.amplitudes;
  auto record = [&](bool last) {
    double nrm = 0.0, ex = 0.0, leak = 0.0, bnd = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      const double p = std::norm(psi[i]);
      nrm += p;
      ex += p * exc[i];
      if (!inside[i]) leak += p;
      if (op.truncated[i]) bnd += p;
    }
    tr.norms.push_back(std::sqrt(nrm));
    tr.excitation.push_back(ex);
    tr.leakage.push_back(leak);
    tr.boundary.push_back(bnd);
    if (opt.keep_snapshots || last) tr.snapshots.push_back({psi});
  };

  std::vector<cplx> k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);
  const cplx mi(0.0, -1.0);
  record(false);
  for (std::size_t g = 0; g + 1 < grid.size(); ++g) {
    const double span = grid[g + 1] - grid[g];
    if (!(span > 0.0)) throw std::invalid_argument("oracle: time grid must be strictly increasing");
    const auto steps = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(span / opt.max_step - 1e-9)));
    const double dt = span / static_cast<double>(steps);
    for (std::size_t s = 0; s < steps; ++s) {
      const double t = grid[g] + dt * static_cast<double>(s);
      prop.set_time(t);
      prop.apply(psi, k1);
      prop.set_time(t + 0.5 * dt);
      for (std::size_t i = 0; i < dim; ++i) tmp[i] = psi[i] + 0.5 * dt * mi * k1[i];
      prop.apply(tmp, k2);
      for (std::size_t i = 0; i < dim; ++i) tmp[i] = psi[i] + 0.5 * dt * mi * k2[i];
      prop.apply(tmp, k3);
      prop.set_time(t + dt);
      for (std::size_t i = 0; i < dim; ++i) tmp[i] = psi[i] + dt * mi * k3[i];
      prop.apply(tmp, k4);
      for (std::size_t i = 0; i < dim; ++i) psi[i] += dt / 6.0 * mi * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    if (!all_finite(psi)) throw NumericalError("oracle: non-finite amplitude at t = " + std::to_string(grid[g + 1]));
    record(g + 2 == grid.size());
  }
  return tr;
}

struct CompareOptions {
  double subspace_step = 0.0;  // 0: derived from the spec with step_factor below
  double subspace_step_factor = 0.002;
  double oracle_step = 0.0;    // 0: same as the subspace step
};

/// Runs both evolutions from (|G> + |l>)/sqrt(2) and returns the largest
/// distance between the subspace state and the oracle state over the grid.
/// Weight the oracle puts outside the subspace counts towards the distance.
inline double compare_subspace_oracle(const ChainSpec& spec, const std::vector<double>& grid,
                                      const CompareOptions& opt = {}) {
  const auto realization = apply_disorder(spec, 0);
  const bool lossy = !spec.lossless();
  const auto basis = build_subspace_basis(spec);
  const auto layout = OracleLayout::make(spec);
  const auto images = subspace_images(spec, layout);

  EvolveOptions eo;
  eo.step_factor = opt.subspace_step_factor;
  eo.max_step = opt.subspace_step;
  eo.detuned_step_scale = 1.0;
  const double sub_step = default_step(spec, basis, realization, lossy, eo);
  eo.max_step = sub_step;
  const auto sub = evolve(spec, realization, ghz_initial_state(spec), grid, lossy, eo);

  const double h = 1.0 / std::sqrt(2.0);
  const auto psi0 = FullState::from_products(
      layout, {{decoupled_state(spec.N), h}, {basis.states[basis.left_edge()], h}});
  OracleOptions oo;
  oo.max_step = opt.oracle_step > 0.0 ? opt.oracle_step : sub_step;
  const auto full = full_hilbert_evolve(spec, realization, psi0, grid, lossy, oo);

  double worst = 0.0;
  std::vector<bool> mapped(layout.dimension(), false);
  for (auto i : images) mapped[i] = true;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto& a = sub.snapshots[k];
    const auto& f = full.snapshots[k].amplitudes;
    const double t = grid[k];
    double d2 = std::norm(a.decoupled - f[images.back()]);
    for (std::size_t i = 0; i < basis.size(); ++i) {
      cplx c = a.amplitudes[i];
      if (spec.scheme == Scheme::B) {
        // static-frame e amplitudes carry the edge rotation
        if (i == 1) c *= std::polar(1.0, spec.delta1 * spec.g0 * t);
        if (i + 2 == basis.size()) c *= std::polar(1.0, spec.delta2 * spec.g0 * t);
      }
      d2 += std::norm(c - f[images[i]]);
    }
    for (std::size_t j = 0; j < f.size(); ++j)
      if (!mapped[j]) d2 += std::norm(f[j]);
    worst = std::max(worst, std::sqrt(d2));
  }
  return worst;
}

}  // namespace ghzchain
