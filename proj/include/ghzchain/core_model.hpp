#pragma once

// Chain specification, pulse schedules, single-excitation basis, quenched
// disorder and instantaneous Hamiltonian assembly for the qutrit-resonator
// chain. Rates (detunings, decay, drives) are given in units of g0 and scaled by
// it on assembly; times are in units of 1/g0 for the default g0 = 1.

#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ghzchain {

using cplx = std::complex<double>;

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Scheme { A, B, C };

inline char scheme_name(Scheme s) { return s == Scheme::A ? 'A' : (s == Scheme::B ? 'B' : 'C'); }

inline Scheme parse_scheme(const std::string& s) {
  if (s == "A" || s == "a") return Scheme::A;
  if (s == "B" || s == "b") return Scheme::B;
  if (s == "C" || s == "c") return Scheme::C;
  throw ConfigError("scheme", "expected one of A, B, C, got '" + s + "'");
}

/// Default pulse width is T / kDefaultTauDivisor when `tau` is not set.
inline constexpr double kDefaultTauDivisor = 5.5;

/// Full protocol description. `gamma` holds either one rate for every qutrit or
/// one rate per qutrit (length N); `kappa` one rate or one per resonator (N-1).
struct ChainSpec {
  int N = 25;
  Scheme scheme = Scheme::A;
  double g0 = 1.0;
  double T = 3600.0;
  std::optional<double> tau;
  double tau_divisor = kDefaultTauDivisor;
  double delta1 = 400.0;
  double delta2 = 400.0;
  double jprime_scale = 20.0;
  double omega_edge = 20.0;
  bool stark_compensation = true;
  std::vector<double> gamma{0.0};
  std::vector<double> kappa{0.0};
  double disorder_delta = 0.0;
  std::uint64_t seed = 20210101;

  double pulse_width() const { return tau ? *tau : T / tau_divisor; }

  double gamma_at(int qutrit) const {  // qutrit in 1..N
    return gamma.size() == 1 ? gamma.front() : gamma.at(static_cast<std::size_t>(qutrit - 1));
  }
  double kappa_at(int resonator) const {  // resonator in 1..N-1
    return kappa.size() == 1 ? kappa.front() : kappa.at(static_cast<std::size_t>(resonator - 1));
  }
  bool lossless() const {
    for (double g : gamma)
      if (g != 0.0) return false;
    for (double k : kappa)
      if (k != 0.0) return false;
    return true;
  }
  int dimension() const { return scheme == Scheme::A ? 2 * N - 1 : 2 * N + 1; }

  friend bool operator==(const ChainSpec&, const ChainSpec&) = default;
};

/// Throws ConfigError naming the offending key. Returns non-fatal warnings.
inline std::vector<std::string> validate(const ChainSpec& s) {
  std::vector<std::string> warnings;
  if (s.N < 2) throw ConfigError("N", "must be >= 2");
  if (!(s.g0 > 0.0)) throw ConfigError("g0", "must be > 0");
  if (!(s.T > 0.0)) throw ConfigError("T", "must be > 0");
  if (s.tau && !(*s.tau > 0.0)) throw ConfigError("tau", "must be > 0");
  if (!(s.tau_divisor > 0.0)) throw ConfigError("tau_divisor", "must be > 0");
  if (s.gamma.empty() || (s.gamma.size() != 1 && s.gamma.size() != static_cast<std::size_t>(s.N)))
    throw ConfigError("gamma", "expected 1 or N values");
  if (s.kappa.empty() ||
      (s.kappa.size() != 1 && s.kappa.size() != static_cast<std::size_t>(s.N - 1)))
    throw ConfigError("kappa", "expected 1 or N-1 values");
  for (double g : s.gamma)
    if (!(g >= 0.0)) throw ConfigError("gamma", "must be >= 0");
  for (double k : s.kappa)
    if (!(k >= 0.0)) throw ConfigError("kappa", "must be >= 0");
  if (!(s.disorder_delta >= 0.0)) throw ConfigError("disorder_delta", "must be >= 0");
  if (s.scheme == Scheme::B) {
    if (s.delta1 == 0.0) throw ConfigError("delta1", "must be nonzero for scheme B");
    if (s.delta2 == 0.0) throw ConfigError("delta2", "must be nonzero for scheme B");
    const double bound = 10.0 * s.jprime_scale * s.g0;
    if (std::abs(s.delta1) < bound) warnings.push_back("delta1 < 10 * jprime_scale * g0: edge elimination is poor");
    if (std::abs(s.delta2) < bound) warnings.push_back("delta2 < 10 * jprime_scale * g0: edge elimination is poor");
  }
  return warnings;
}

// ---------------------------------------------------------------------------
// Pulses

struct CouplingProfile {
  double g0 = 1.0;
  double tau = 1.0;
  double center1 = 3.0;  // in units of tau
  double center2 = 2.0;

  static CouplingProfile from(const ChainSpec& s) { return {s.g0, s.pulse_width(), 3.0, 2.0}; }
};

struct Couplings {
  double J1;
  double J2;
};

/// Gaussian envelopes J1 = g0 exp[-(t-3tau)^2/tau^2], J2 = g0 exp[-(t-2tau)^2/tau^2].
inline Couplings eval_couplings(const CouplingProfile& p, double t) {
  const double x1 = (t - p.center1 * p.tau) / p.tau;
  const double x2 = (t - p.center2 * p.tau) / p.tau;
  return {p.g0 * std::exp(-x1 * x1), p.g0 * std::exp(-x2 * x2)};
}

/// Drive amplitudes for one scheme at time t: the intra-cell bond (qutrit A_n to
/// resonator B_n), the inter-cell bond (B_n to A_{n+1}) and the two edge drives.
/// Scheme C runs the bulk pulses in reverse order; its edge drives copy them.
struct ChainDrives {
  double intra;
  double inter;
  double edge_left;
  double edge_right;
};

inline ChainDrives eval_drives(const ChainSpec& s, double t) {
  const auto c = eval_couplings(CouplingProfile::from(s), t);
  switch (s.scheme) {
    case Scheme::A:
      return {c.J1, c.J2, 0.0, 0.0};
    case Scheme::B:
      return {c.J1, c.J2, s.omega_edge * s.g0, s.omega_edge * s.g0};
    case Scheme::C:
      // intra-cell J1 follows the 2tau pulse, inter-cell J2 the 3tau pulse;
      // left drive equals J2, right drive equals J1.
      return {c.J2, c.J1, c.J1, c.J2};
  }
  return {};
}

// ---------------------------------------------------------------------------
// Basis

enum class Level : std::uint8_t { L, R, E, P };

inline char level_char(Level l) {
  switch (l) {
    case Level::L: return 'L';
    case Level::R: return 'R';
    case Level::E: return 'e';
    case Level::P: return 'P';
  }
  return '?';
}

/// Product state of the whole chain: qutrit levels A_1..A_N, photons B_1..B_{N-1}.
struct ProductState {
  std::vector<Level> qutrits;
  std::vector<int> photons;

  std::string to_string() const {
    std::string out = "|";
    for (Level l : qutrits) out += level_char(l);
    out += ">|";
    for (int p : photons) out += static_cast<char>('0' + p);
    out += ">";
    return out;
  }
  friend bool operator==(const ProductState&, const ProductState&) = default;
};

struct SiteLabel {
  enum class Kind { AuxGroundP, QutritExcited, ResonatorPhoton, TargetGround };
  Kind kind;
  int index;  // 1-based qutrit or resonator index; unused for P/target

  bool is_qutrit_excited() const { return kind == Kind::QutritExcited; }
  bool is_photon() const { return kind == Kind::ResonatorPhoton; }

  std::string to_string() const {
    switch (kind) {
      case Kind::AuxGroundP: return "P@A1";
      case Kind::QutritExcited: return "e@A" + std::to_string(index);
      case Kind::ResonatorPhoton: return "ph@B" + std::to_string(index);
      case Kind::TargetGround: return "target@A" + std::to_string(index);
    }
    return "?";
  }
  friend bool operator==(const SiteLabel&, const SiteLabel&) = default;
};

inline Level flipped(Level l) { return l == Level::L ? Level::R : (l == Level::R ? Level::L : l); }

/// The decoupled reference |G> = |RLR...>|00...0>.
inline ProductState decoupled_state(int N) {
  ProductState g;
  g.qutrits.resize(static_cast<std::size_t>(N));
  for (int n = 1; n <= N; ++n) g.qutrits[static_cast<std::size_t>(n - 1)] = (n % 2 == 1) ? Level::R : Level::L;
  g.photons.assign(static_cast<std::size_t>(N - 1), 0);
  return g;
}

/// The ground level j_n that resonator B_n couples to |e>: L for odd n, R for even n.
inline Level coupled_ground(int resonator) { return resonator % 2 == 1 ? Level::L : Level::R; }

inline ProductState product_state(int N, const SiteLabel& label) {
  ProductState s = decoupled_state(N);
  auto flip_through = [&](int k) {
    for (int n = 1; n <= k; ++n) s.qutrits[static_cast<std::size_t>(n - 1)] = flipped(s.qutrits[static_cast<std::size_t>(n - 1)]);
  };
  switch (label.kind) {
    case SiteLabel::Kind::AuxGroundP:
      s.qutrits[0] = Level::P;
      break;
    case SiteLabel::Kind::QutritExcited:
      flip_through(label.index - 1);
      s.qutrits[static_cast<std::size_t>(label.index - 1)] = Level::E;
      break;
    case SiteLabel::Kind::ResonatorPhoton:
      flip_through(label.index);
      s.photons[static_cast<std::size_t>(label.index - 1)] = 1;
      break;
    case SiteLabel::Kind::TargetGround:
      flip_through(N);
      break;
  }
  return s;
}

struct SubspaceBasis {
  Scheme scheme = Scheme::A;
  int N = 0;
  std::vector<SiteLabel> labels;
  std::vector<ProductState> states;

  std::size_t size() const { return labels.size(); }

  /// Index of the left-edge state (e@A1 for scheme A, P@A1 otherwise).
  std::size_t left_edge() const { return 0; }
  /// Index of the right-edge state (e@AN for scheme A, target otherwise).
  std::size_t right_edge() const { return labels.size() - 1; }

  /// Sites carrying the transfer (zero) mode.
  std::vector<bool> zero_mode_sublattice() const {
    std::vector<bool> on(labels.size(), false);
    for (std::size_t i = 0; i < labels.size(); ++i) {
      const auto& l = labels[i];
      switch (scheme) {
        case Scheme::A:
          on[i] = l.is_qutrit_excited();
          break;
        case Scheme::B:
          on[i] = l.kind == SiteLabel::Kind::AuxGroundP || l.kind == SiteLabel::Kind::TargetGround ||
                  (l.is_qutrit_excited() && l.index != 1 && l.index != N);
          break;
        case Scheme::C:
          on[i] = !l.is_qutrit_excited();
          break;
      }
    }
    return on;
  }
};

inline SubspaceBasis build_subspace_basis(const ChainSpec& spec) {
  SubspaceBasis b;
  b.scheme = spec.scheme;
  b.N = spec.N;
  if (spec.scheme != Scheme::A) b.labels.push_back({SiteLabel::Kind::AuxGroundP, 1});
  for (int n = 1; n <= spec.N; ++n) {
    b.labels.push_back({SiteLabel::Kind::QutritExcited, n});
    if (n < spec.N) b.labels.push_back({SiteLabel::Kind::ResonatorPhoton, n});
  }
  if (spec.scheme != Scheme::A) b.labels.push_back({SiteLabel::Kind::TargetGround, spec.N});
  b.states.reserve(b.labels.size());
  for (const auto& l : b.labels) b.states.push_back(product_state(spec.N, l));
  return b;
}

// ---------------------------------------------------------------------------
// Disorder

/// SplitMix64 finalizer; mixes (seed, index) into an independent stream seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// One multiplier per qutrit-resonator bond, ordered left to right
/// (A1-B1, B1-A2, A2-B2, ..., B_{N-1}-A_N).
struct DisorderRealization {
  std::vector<double> multipliers;
  std::uint64_t seed = 0;

  static DisorderRealization none(int N) { return {std::vector<double>(static_cast<std::size_t>(2 * N - 2), 1.0), 0}; }
};

inline DisorderRealization apply_disorder(const ChainSpec& spec, std::uint64_t sample_index) {
  if (!(spec.disorder_delta >= 0.0)) throw ConfigError("disorder_delta", "must be >= 0");
  DisorderRealization r;
  r.seed = mix_seed(spec.seed, sample_index);
  const auto bonds = static_cast<std::size_t>(2 * spec.N - 2);
  if (spec.disorder_delta == 0.0) {
    r.multipliers.assign(bonds, 1.0);
    return r;
  }
  std::mt19937_64 rng(r.seed);
  std::uniform_real_distribution<double> u(-spec.disorder_delta, spec.disorder_delta);
  r.multipliers.resize(bonds);
  for (auto& m : r.multipliers) m = 1.0 + u(rng);
  return r;
}

// ---------------------------------------------------------------------------
// Hamiltonian

/// Tridiagonal operator: complex diagonal, real symmetric nearest-neighbour band.
struct HamiltonianMatrix {
  std::vector<cplx> diagonal;
  std::vector<double> bonds;  // bonds[i] couples sites i and i+1

  std::size_t dimension() const { return diagonal.size(); }

  void apply(std::span<const cplx> in, std::span<cplx> out) const {
    const std::size_t d = diagonal.size();
    for (std::size_t i = 0; i < d; ++i) out[i] = diagonal[i] * in[i];
    for (std::size_t i = 0; i + 1 < d; ++i) {
      out[i] += bonds[i] * in[i + 1];
      out[i + 1] += bonds[i] * in[i];
    }
  }

  bool is_hermitian() const {
    for (const auto& z : diagonal)
      if (z.imag() != 0.0) return false;
    return true;
  }
};

namespace detail {

/// Fills bonds and lossless diagonal; multipliers apply to qutrit-resonator bonds.
inline void assemble_bonds(const ChainSpec& spec, const ChainDrives& d, std::span<const double> mult,
                           std::vector<double>& bonds) {
  const int N = spec.N;
  const std::size_t bulk = static_cast<std::size_t>(2 * N - 2);
  const std::size_t off = spec.scheme == Scheme::A ? 0 : 1;
  bonds.assign(bulk + 2 * off, 0.0);
  for (std::size_t k = 0; k < bulk; ++k) bonds[off + k] = ((k % 2 == 0) ? d.intra : d.inter) * mult[k];
  if (spec.scheme == Scheme::B) {
    bonds[off] *= spec.jprime_scale;
    bonds[off + bulk - 1] *= spec.jprime_scale;
  }
  if (off) {
    bonds.front() = d.edge_left;
    bonds.back() = d.edge_right;
  }
}

}  // namespace detail

/// Scheme B static-frame detuning and Stark compensation on the diagonal, given
/// the magnitudes of the four edge bonds (|P-e1|, |e1-B1|, |B_{N-1}-eN|, |eN-target|).
inline void add_scheme_b_edges(const ChainSpec& spec, std::span<const double> edge_bonds, std::vector<cplx>& diag) {
  const std::size_t d = diag.size();
  const double d1 = spec.delta1 * spec.g0;
  const double d2 = spec.delta2 * spec.g0;
  diag[1] += d1;
  diag[d - 2] += d2;
  if (spec.stark_compensation) {
    diag[0] += edge_bonds[0] * edge_bonds[0] / d1;
    diag[2] += edge_bonds[1] * edge_bonds[1] / d1;
    diag[d - 3] += edge_bonds[2] * edge_bonds[2] / d2;
    diag[d - 1] += edge_bonds[3] * edge_bonds[3] / d2;
  }
}

/// Decay terms -i*gamma_n/2 on e@A_n and -i*kappa_n/2 on ph@B_n.
inline void add_losses(const ChainSpec& spec, const SubspaceBasis& basis, std::vector<cplx>& diag) {
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const auto& l = basis.labels[i];
    if (l.is_qutrit_excited()) diag[i] -= cplx(0.0, 0.5 * spec.gamma_at(l.index) * spec.g0);
    if (l.is_photon()) diag[i] -= cplx(0.0, 0.5 * spec.kappa_at(l.index) * spec.g0);
  }
}

/// Fills `out` with H(t) in the single-excitation basis, reusing its storage.
inline void hamiltonian_into(const ChainSpec& spec, const SubspaceBasis& basis, const DisorderRealization& realization,
                             double t, bool lossy, HamiltonianMatrix& out) {
  const std::size_t dim = basis.size();
  if (realization.multipliers.size() != static_cast<std::size_t>(2 * spec.N - 2))
    throw std::invalid_argument("hamiltonian_at: disorder realization has " +
                                std::to_string(realization.multipliers.size()) + " bonds, expected " +
                                std::to_string(2 * spec.N - 2));
  if (dim != static_cast<std::size_t>(spec.dimension()) || basis.scheme != spec.scheme)
    throw std::invalid_argument("hamiltonian_at: basis does not match spec");
  detail::assemble_bonds(spec, eval_drives(spec, t), realization.multipliers, out.bonds);
  out.diagonal.assign(dim, cplx(0.0, 0.0));
  if (spec.scheme == Scheme::B) {
    const double edges[4] = {out.bonds[0], out.bonds[1], out.bonds[dim - 3], out.bonds[dim - 2]};
    add_scheme_b_edges(spec, edges, out.diagonal);
  }
  if (lossy) add_losses(spec, basis, out.diagonal);
}

inline HamiltonianMatrix hamiltonian_at(const ChainSpec& spec, const SubspaceBasis& basis,
                                        const DisorderRealization& realization, double t, bool lossy) {
  HamiltonianMatrix h;
  hamiltonian_into(spec, basis, realization, t, lossy, h);
  return h;
}

/// Scheme B in the explicit time-dependent-phase form: the edge bonds carry
/// e^{i delta t} and no static detuning sits on the diagonal. Used to validate
/// the rotating-frame construction.
struct PhasedTridiagonal {
  std::vector<cplx> diagonal;
  std::vector<cplx> upper;  // upper[i] = <i|H|i+1>; lower is the conjugate

  std::size_t dimension() const { return diagonal.size(); }

  void apply(std::span<const cplx> in, std::span<cplx> out) const {
    const std::size_t d = diagonal.size();
    for (std::size_t i = 0; i < d; ++i) out[i] = diagonal[i] * in[i];
    for (std::size_t i = 0; i + 1 < d; ++i) {
      out[i] += upper[i] * in[i + 1];
      out[i + 1] += std::conj(upper[i]) * in[i];
    }
  }
};

inline void phased_hamiltonian_into(const ChainSpec& spec, const SubspaceBasis& basis,
                                    const DisorderRealization& realization, double t, bool lossy,
                                    PhasedTridiagonal& out) {
  if (spec.scheme != Scheme::B) throw std::invalid_argument("phased form exists only for scheme B");
  std::vector<double> bonds;
  detail::assemble_bonds(spec, eval_drives(spec, t), realization.multipliers, bonds);
  const std::size_t dim = basis.size();
  out.diagonal.assign(dim, cplx(0.0, 0.0));
  out.upper.assign(bonds.begin(), bonds.end());
  // <e1|H|P> = Omega e^{i d1 t}  ->  upper[0] = <P|H|e1> = Omega e^{-i d1 t}
  const double d1 = spec.delta1 * spec.g0;
  const double d2 = spec.delta2 * spec.g0;
  const cplx ph1 = std::polar(1.0, d1 * t);
  const cplx ph2 = std::polar(1.0, d2 * t);
  out.upper[0] *= std::conj(ph1);
  out.upper[1] *= ph1;  // <e1|H|B1>
  out.upper[dim - 3] *= std::conj(ph2);  // <B_{N-1}|H|eN>
  out.upper[dim - 2] *= ph2;  // <eN|H|target>
  if (spec.stark_compensation) {
    out.diagonal[0] += bonds[0] * bonds[0] / d1;
    out.diagonal[2] += bonds[1] * bonds[1] / d1;
    out.diagonal[dim - 3] += bonds[dim - 3] * bonds[dim - 3] / d2;
    out.diagonal[dim - 1] += bonds[dim - 2] * bonds[dim - 2] / d2;
  }
  if (lossy) add_losses(spec, basis, out.diagonal);
}

}  // namespace ghzchain
