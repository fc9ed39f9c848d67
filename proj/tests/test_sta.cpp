#include <gtest/gtest.h>

#include "ghzchain/sta.hpp"

using namespace ghzchain;

namespace {

ChainSpec chain(int N, double T) {
  ChainSpec s;
  s.N = N;
  s.T = T;
  return s;
}

}  // namespace

TEST(Control, VanishesForStaticSchedule) {
  auto flat = [](double) { return Couplings{0.4, 0.9}; };
  for (auto mode : {ControlMode::FullRank, ControlMode::NnnTruncated}) {
    const auto f = counterdiabatic_control(flat, 12, 3.0, mode, 1e-3);
    EXPECT_EQ(f.K.cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(Control, AntisymmetricAndTruncated) {
  const auto s = chain(9, 700.0);
  for (double t : {100.0, 300.0, 400.0, 600.0}) {
    const auto full = counterdiabatic_control(s, t, ControlMode::FullRank);
    EXPECT_LT((full.K + full.K.transpose()).cwiseAbs().maxCoeff(), 1e-14);
    const auto m = control_matrix(full);
    EXPECT_LT((m - m.adjoint()).cwiseAbs().maxCoeff(), 1e-14);
    for (Eigen::Index i = 1; i < m.rows(); i += 2) EXPECT_EQ(m.row(i).cwiseAbs().maxCoeff(), 0.0);
    const auto nnn = counterdiabatic_control(s, t, ControlMode::NnnTruncated);
    for (Eigen::Index i = 0; i < 9; ++i)
      for (Eigen::Index j = 0; j < 9; ++j) {
        if (std::abs(i - j) == 1)
          EXPECT_EQ(nnn.K(i, j), full.K(i, j));
        else
          EXPECT_EQ(nnn.K(i, j), 0.0);
      }
    EXPECT_EQ(nnn.alpha().size(), 8u);
  }
}

TEST(Control, RejectsUnsupportedChains) {
  auto s = chain(5, 100.0);
  s.scheme = Scheme::B;
  EXPECT_THROW(counterdiabatic_control(s, 10.0, ControlMode::FullRank), std::invalid_argument);
  auto dead = [](double) { return Couplings{0.5, 0.0}; };
  EXPECT_THROW(counterdiabatic_control(dead, 5, 1.0, ControlMode::FullRank, 1e-3), std::invalid_argument);
  EXPECT_THROW(parse_control_mode("sideways"), ConfigError);
  EXPECT_EQ(parse_control_mode("nnn_truncated"), ControlMode::NnnTruncated);
}

TEST(Sta, ZeroScaleMatchesPlainEvolution) {
  const auto s = chain(7, 300.0);
  StaOptions o;
  o.alpha_scale = 0.0;
  o.max_step = 0.05;
  const auto grid = uniform_grid(s.T, 7);
  const auto a = evolve_with_sta(s, ControlMode::FullRank, grid, o);
  EvolveOptions eo;
  eo.max_step = 0.05;
  const auto b = evolve(s, DisorderRealization::none(7), left_edge_state(s), grid, false, eo);
  for (std::size_t k = 0; k < grid.size(); ++k) EXPECT_EQ(a.snapshots[k].amplitudes, b.snapshots[k].amplitudes);
}

TEST(Sta, FullRankRescuesFastTransfer) {
  const auto s = chain(25, 3600.0);
  for (double frac : {0.1, 0.05}) {
    auto fast = s;
    fast.T = s.T * frac;
    const double plain = std::norm(
        evolve(fast, DisorderRealization::none(25), left_edge_state(fast), {0.0, fast.T}, false).final_state().amplitudes.back());
    const double controlled = sta_transfer_fidelity(fast, ControlMode::FullRank);
    EXPECT_GE(controlled, 0.999) << frac;
    EXPECT_GT(controlled, plain);
  }
}

TEST(Sta, TruncatedNoWorseThanNone) {
  auto s = chain(25, 1200.0);
  const double none = std::norm(evolve(s, DisorderRealization::none(25), left_edge_state(s), {0.0, s.T}, false).final_state().amplitudes.back());
  EXPECT_GE(sta_transfer_fidelity(s, ControlMode::NnnTruncated), none);
}

TEST(Sta, ConservesNorm) {
  const auto s = chain(11, 200.0);
  const auto tr = evolve_with_sta(s, ControlMode::FullRank, uniform_grid(s.T, 21));
  for (double n : tr.norms) EXPECT_NEAR(n, 1.0, 1e-9);
}

TEST(Sta, RejectsLossyChain) {
  auto s = chain(5, 100.0);
  s.gamma = {0.01};
  EXPECT_THROW(evolve_with_sta(s, ControlMode::FullRank, {0.0, 100.0}), std::invalid_argument);
}
