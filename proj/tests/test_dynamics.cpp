#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ghzchain/dynamics.hpp"
#include "ghzchain/oracle.hpp"

using namespace ghzchain;

namespace {

ChainSpec make(int N, Scheme s, double T) {
  ChainSpec c;
  c.N = N;
  c.scheme = s;
  c.T = T;
  return c;
}

double ghz(const ChainSpec& s, bool lossy = false, const EvolveOptions& opt = {}) {
  return ghz_final_fidelity(s, apply_disorder(s, 0), lossy, opt);
}

}  // namespace

TEST(States, InitialSchemeA) {
  const auto s = make(3, Scheme::A, 100.0);
  const auto v = ghz_initial_state(s);
  EXPECT_EQ(v.dimension(), 5u);
  EXPECT_DOUBLE_EQ(v.decoupled.real(), 1.0 / std::sqrt(2.0));
  EXPECT_DOUBLE_EQ(v.amplitudes[0].real(), 1.0 / std::sqrt(2.0));
  for (std::size_t i = 1; i < 5; ++i) EXPECT_EQ(v.amplitudes[i], cplx(0.0, 0.0));
}

TEST(States, InitialSchemeBUsesAuxiliaryLevel) {
  const auto s = make(25, Scheme::B, 100.0);
  const auto v = ghz_initial_state(s);
  const auto b = build_subspace_basis(s);
  EXPECT_EQ(b.labels[0].to_string(), "P@A1");
  EXPECT_EQ(b.states[0].to_string().substr(0, 4), "|PLR");
  EXPECT_DOUBLE_EQ(std::norm(v.amplitudes[0]), 0.5);
}

TEST(States, UnitNormForAllSchemes) {
  for (Scheme sc : {Scheme::A, Scheme::B, Scheme::C})
    for (int N = 2; N < 30; N += 3) {
      EXPECT_DOUBLE_EQ(ghz_initial_state(make(N, sc, 1.0)).norm(), 1.0);
      EXPECT_DOUBLE_EQ(ideal_ghz_state(make(N, sc, 1.0)).norm(), 1.0);
    }
}

TEST(States, IdealSigns) {
  EXPECT_GT(ideal_ghz_state(make(25, Scheme::A, 1.0)).amplitudes.back().real(), 0.0);
  EXPECT_LT(ideal_ghz_state(make(2, Scheme::A, 1.0)).amplitudes.back().real(), 0.0);
  EXPECT_GT(ideal_ghz_state(make(25, Scheme::B, 1.0)).amplitudes.back().real(), 0.0);
  EXPECT_LT(ideal_ghz_state(make(25, Scheme::C, 1.0)).amplitudes.back().real(), 0.0);
  EXPECT_GT(ideal_ghz_state(make(4, Scheme::C, 1.0)).amplitudes.back().real(), 0.0);
}

TEST(Evolve, ZeroCouplingsLeaveStateUnchanged) {
  const std::size_t d = 7;
  HamiltonianMatrix zero{std::vector<cplx>(d, 0.0), std::vector<double>(d - 1, 0.0)};
  auto source = [&](double, HamiltonianMatrix& h) { h = zero; };
  StateVector psi;
  psi.amplitudes = {0.1, cplx(0.2, 0.3), 0.0, 0.4, 0.0, cplx(0.0, -0.5), 0.3};
  psi.decoupled = 0.2;
  const auto tr = evolve_with<HamiltonianMatrix>(source, psi, uniform_grid(50.0, 11), 0.1, true);
  for (const auto& s : tr.snapshots) EXPECT_EQ(s.amplitudes, psi.amplitudes);
}

TEST(Evolve, RejectsBadGridAndDimension) {
  const auto s = make(3, Scheme::A, 100.0);
  EXPECT_THROW(evolve(s, DisorderRealization::none(3), ghz_initial_state(s), {0.0, 0.0}, false), std::invalid_argument);
  EXPECT_THROW(evolve(s, DisorderRealization::none(3), ghz_initial_state(make(4, Scheme::A, 1.0)), {0.0, 1.0}, false),
               std::invalid_argument);
}

TEST(Evolve, NonFiniteAborts) {
  HamiltonianMatrix h{std::vector<cplx>(3, std::numeric_limits<double>::quiet_NaN()), std::vector<double>(2, 0.0)};
  auto source = [&](double, HamiltonianMatrix& op) { op = h; };
  EXPECT_THROW(evolve_with<HamiltonianMatrix>(source, StateVector::basis(3, 0), {0.0, 1.0}, 0.1, false), NumericalError);
}

TEST(Fidelity, StartsAtQuarterAndOne) {
  const auto s = make(5, Scheme::A, 200.0);
  const auto tr = evolve(s, DisorderRealization::none(5), ghz_initial_state(s), uniform_grid(s.T, 21), false);
  EXPECT_NEAR(fidelity(tr, ideal_ghz_state(s)).front(), 0.25, 1e-15);
  EXPECT_NEAR(fidelity(tr, ghz_initial_state(s)).front(), 1.0, 1e-15);
  const auto pops = populations(s, tr, {"l"});
  EXPECT_NEAR(pops.at("l").front(), 0.5, 1e-15);
}

// Frozen reference values from an independent adaptive 8th-order integration
TEST(Fidelity, FrozenReferenceValues) {
  EXPECT_NEAR(ghz(make(3, Scheme::A, 100.0)), 0.9997323343058749, 1e-8);
  EXPECT_NEAR(ghz(make(5, Scheme::A, 200.0)), 0.9992961820644882, 1e-8);
  EXPECT_NEAR(ghz(make(3, Scheme::C, 100.0)), 0.9968768738227533, 1e-8);
  EXPECT_NEAR(ghz(make(2, Scheme::B, 50.0)), 0.9983389598521692, 1e-8);
  auto lossy = make(3, Scheme::A, 100.0);
  lossy.gamma = {0.01};
  lossy.kappa = {0.01};
  EXPECT_NEAR(ghz(lossy, true), 0.6451047799336164, 1e-8);
}

TEST(Fidelity, FullDecayLeavesQuarter) {
  auto s = make(11, Scheme::A, 6.9419 * 121 + 2.455 * 11 - 59.8933);
  s.gamma = {0.01};
  EXPECT_NEAR(ghz(s, true), 0.25, 0.03);
}

TEST(Populations, UnknownProjector) {
  const auto s = make(3, Scheme::A, 10.0);
  EXPECT_THROW(named_state(s, "nonsense"), std::invalid_argument);
  EXPECT_THROW(named_state(s, "site:99"), std::invalid_argument);
  EXPECT_NO_THROW(named_state(s, "ph@B2"));
  EXPECT_NO_THROW(named_state(s, "site:4"));
}

TEST(Populations, CompletenessEqualsNormSquared) {
  auto s = make(4, Scheme::C, 150.0);
  s.gamma = {0.02};
  s.kappa = {0.03};
  const auto tr = evolve(s, DisorderRealization::none(4), ghz_initial_state(s), uniform_grid(s.T, 31), true);
  std::vector<std::string> names{"G"};
  for (int i = 0; i < s.dimension(); ++i) names.push_back("site:" + std::to_string(i));
  const auto pops = populations(s, tr, names);
  for (std::size_t k = 0; k < tr.times.size(); ++k) {
    double sum = 0.0;
    for (const auto& n : names) sum += pops.at(n)[k];
    EXPECT_NEAR(sum, tr.norms[k] * tr.norms[k], 1e-13);
  }
}

TEST(Properties, LosslessNormConservation) {
  for (Scheme sc : {Scheme::A, Scheme::B, Scheme::C}) {
    auto s = make(8, sc, 400.0);
    s.disorder_delta = 0.3;
    const auto tr = evolve(s, apply_disorder(s, 1), ghz_initial_state(s), uniform_grid(s.T, 41), false);
    for (double n : tr.norms) EXPECT_NEAR(n, 1.0, 1e-9);
  }
}

TEST(Properties, LossyNormMonotone) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 0.05);
  for (int trial = 0; trial < 6; ++trial) {
    auto s = make(3 + trial, static_cast<Scheme>(trial % 3), 150.0);
    s.gamma = {u(rng)};
    s.kappa = {u(rng)};
    const auto tr = evolve(s, DisorderRealization::none(s.N), ghz_initial_state(s), uniform_grid(s.T, 301), true);
    for (std::size_t k = 1; k < tr.norms.size(); ++k) EXPECT_LE(tr.norms[k], tr.norms[k - 1] + 1e-12);
  }
}

TEST(Properties, StepHalvingDrift) {
  for (Scheme sc : {Scheme::A, Scheme::B, Scheme::C}) {
    auto s = make(9, sc, 560.0);
    s.gamma = {0.005};
    const auto basis = build_subspace_basis(s);
    EvolveOptions opt;
    const double h = default_step(s, basis, DisorderRealization::none(s.N), true, opt);
    opt.max_step = h;
    const double f1 = ghz(s, true, opt);
    opt.max_step = h / 2.0;
    const double f2 = ghz(s, true, opt);
    EXPECT_LT(std::abs(f1 - f2), 1e-7) << scheme_name(sc);
  }
}

TEST(Properties, ParityLawAgainstOracle) {
  for (int N = 2; N <= 5; ++N) {
    auto s = make(N, Scheme::A, 60.0 * N * N);
    const auto tr = evolve(s, DisorderRealization::none(N), left_edge_state(s), {0.0, s.T}, false);
    const cplx r = tr.final_state().amplitudes.back();
    EXPECT_GT(std::norm(r), 0.999) << N;
    const double expect = -std::pow(-1.0, N);
    EXPECT_GT(r.real() * expect, 0.0) << N;
    if (N <= kOracleMaxN) {
      const auto layout = OracleLayout::make(s);
      const auto basis = build_subspace_basis(s);
      OracleOptions oo;
      oo.max_step = 0.02;
      oo.keep_snapshots = false;
      const auto full = full_hilbert_evolve(s, DisorderRealization::none(N), FullState::from_products(layout, {{basis.states.front(), 1.0}}),
                                            {0.0, s.T}, false, oo);
      const cplx fr = full.snapshots.back().amplitudes[layout.index_of(basis.states.back())];
      EXPECT_GT(fr.real() * expect, 0.0) << N;
      EXPECT_NEAR(std::abs(fr - r), 0.0, 1e-6) << N;
    }
  }
}

TEST(Fig3, RightEdgeRisesAfterCrossing) {
  const auto s = make(25, Scheme::A, 3600.0);
  const auto tr = evolve(s, DisorderRealization::none(25), ghz_initial_state(s), uniform_grid(s.T, 73), false);
  const auto pops = populations(s, tr, {"r", "ideal"});
  EXPECT_NEAR(pops.at("ideal").front(), 0.25, 1e-12);
  EXPECT_GT(pops.at("ideal").back(), 0.99);
  for (std::size_t k = 0; k < tr.times.size(); ++k)
    if (tr.times[k] < 1400.0) { EXPECT_LT(pops.at("r")[k], 0.01); }
}
