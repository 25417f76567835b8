#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <random>

#include "risiort/aircomp.hpp"
#include "risiort/error.hpp"
#include "risiort/ris.hpp"

namespace risiort::aircomp {
namespace {

Case3Config small(double noise_dbm) {
  Case3Config c;
  c.topology.bs_list = {{{0.0, 0.0, 2.0}, 2}};
  c.topology.ris = {{4.0, 4.0, 2.0}, 2};
  c.topology.devices = {{3.0, 5.0, 0.0}, {5.0, 5.0, 0.0}};
  c.link.noise_power_dbm = noise_dbm;
  c.episode_length = 20;
  return c;
}

std::vector<Eigen::VectorXcd> effective(const std::vector<ChannelSet>& cs, const RisConfig& r) {
  std::vector<Eigen::VectorXcd> out;
  for (const auto& c : cs) out.push_back(effective_channel(c, r));
  return out;
}

RisConfig zeros(std::size_t n) {
  RisConfig r;
  r.phases.assign(n, 0.0);
  return r;
}

TEST(Harvest, HandEvaluation) {
  Eigen::VectorXcd g(2), w(2);
  g << cd(1, 0), cd(0, 0);
  w << cd(std::sqrt(2.0), 0), cd(0.7, 0.7);
  EXPECT_NEAR(harvested_energy(w, {g}, 0.5, 1.0)[0], 1.0, 1e-12);
  EXPECT_EQ(harvested_energy(Eigen::VectorXcd::Zero(2), {g}, 0.5, 1.0)[0], 0.0);
}

TEST(Harvest, MrtBeatsRandomUnitBeams) {
  Rng rng(1);
  const Eigen::VectorXcd g = complex_normal_vector(rng, 4);
  const double mrt = harvested_energy(g.normalized(), {g}, 0.5, 1.0)[0];
  for (int i = 0; i < 1000; ++i)
    EXPECT_LE(harvested_energy(complex_normal_vector(rng, 4).normalized(), {g}, 0.5, 1.0)[0], mrt + 1e-12);
}

TEST(Mse, PerfectAlignmentWithoutNoiseIsZero) {
  Eigen::VectorXcd h(2), a(2), b(1);
  h << cd(0.3, 0.4), cd(-0.2, 0.1);
  a = h.normalized();
  const double eta = 2.0;
  b(0) = std::sqrt(eta) / a.dot(h);
  EXPECT_NEAR(aircomp_mse({h}, b, a, eta, 0.0), 0.0, 1e-24);
}

TEST(Mse, HandEvaluatedNoiseFloor) {
  Eigen::VectorXcd a(1), b(2);
  a << cd(1, 0);
  b << cd(1, 0), cd(1, 0);
  const Eigen::VectorXcd h = Eigen::VectorXcd::Ones(1);
  EXPECT_NEAR(aircomp_mse({h, h}, b, a, 1.0, 0.01), 0.01, 1e-15);
}

TEST(Mse, AgreesWithMonteCarloSymbols) {
  Rng rng(2);
  std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
  for (int trial = 0; trial < 3; ++trial) {
    std::vector<Eigen::VectorXcd> h{complex_normal_vector(rng, 3), complex_normal_vector(rng, 3)};
    const Eigen::VectorXcd a = complex_normal_vector(rng, 3);
    const Eigen::VectorXcd b = complex_normal_vector(rng, 2);
    const double eta = 1.5;
    const double noise = 0.1;
    const double analytic = aircomp_mse(h, b, a, eta, noise);
    double acc = 0.0;
    const int draws = 200000;
    for (int d = 0; d < draws; ++d) {
      cd y{};
      cd s_sum{};
      for (int k = 0; k < 2; ++k) {
        const cd s(nd(rng), nd(rng));
        s_sum += s;
        y += a.dot(h[static_cast<std::size_t>(k)]) * b(k) * s;
      }
      y += a.dot(complex_normal_vector(rng, 3, noise));
      acc += std::norm(y / std::sqrt(eta) - s_sum);
    }
    EXPECT_NEAR(acc / draws / analytic, 1.0, 0.01);
  }
}

TEST(Env, StaticChannelsGiveConstantObservedCsi) {
  Case3Config c = small(-100.0);
  c.aging.rho = 1.0;
  AirCompEnv env(c, 3);
  env.reset();
  const auto first = env.observation();
  Rng rng(4);
  for (int i = 0; i < 5; ++i) {
    AgentActions act;
    act.agent1 = {zeros(2), zeros(2)};
    act.agent2 = {complex_normal_vector(rng, 2).normalized(), complex_normal_vector(rng, 2, 1e-8),
                  complex_normal_vector(rng, 2), 1e-10};
    env.step(act);
    const auto now = env.observation();
    ASSERT_EQ(now.size(), env.observation_dim());
    for (std::size_t j = 1; j < now.size(); ++j) EXPECT_EQ(now[j], first[j]);
  }
}

TEST(Env, FeasibleActionRewardIsExactlyMinusMse) {
  Case3Config c = small(-100.0);
  c.aging.rho = 1.0;
  AirCompEnv env(c, 5);
  env.reset();
  AgentActions act;
  act.agent1 = {zeros(2), zeros(2)};
  act.agent2 = {Eigen::VectorXcd::Constant(2, cd(0.5, 0)), Eigen::VectorXcd::Zero(2),
                Eigen::VectorXcd::Constant(2, cd(1, 0)), 1.0};
  const StepOutcome o = env.step(act);
  EXPECT_EQ(o.penalty, 0.0);
  EXPECT_EQ(o.reward, -o.mse);
}

TEST(Env, ClippedTransmitScoresStrictlyBelowTheFeasibleOne) {
  Case3Config c = small(-100.0);
  c.aging.rho = 1.0;
  AirCompEnv probe(c, 6);
  probe.reset();
  const Eigen::VectorXcd w = Eigen::VectorXcd::Constant(2, cd(std::sqrt(0.5), 0));
  const auto e = harvested_energy(w, effective(probe.true_channels(), zeros(2)), c.eh_efficiency, c.tau_dl);
  Eigen::VectorXcd b(2);
  for (int k = 0; k < 2; ++k) b(k) = std::sqrt(e[static_cast<std::size_t>(k)] / c.tau_ul) * cd(0.6, 0.8);

  AgentActions feasible;
  feasible.agent1 = {zeros(2), zeros(2)};
  feasible.agent2 = {w, b, Eigen::VectorXcd::Constant(2, cd(1, 0)), 1e-12};
  AgentActions oversized = feasible;
  oversized.agent2.b *= 3.0;

  AirCompEnv x(c, 6);
  AirCompEnv y(c, 6);
  x.reset();
  y.reset();
  const StepOutcome ok = x.step(feasible);
  const StepOutcome clipped = y.step(oversized);
  EXPECT_GT(clipped.penalty, 0.0);
  EXPECT_NEAR(clipped.mse, ok.mse, 1e-9 * ok.mse);
  EXPECT_LT(clipped.reward, ok.reward);
}

TEST(Env, EnergyCausalityHoldsAfterClipping) {
  Case3Config c = small(-100.0);
  AirCompEnv env(c, 7);
  env.reset();
  Rng rng(8);
  while (!env.done()) {
    AgentActions act;
    act.agent1 = {random_config(rng, 2, std::nullopt), random_config(rng, 2, std::nullopt)};
    act.agent2 = {complex_normal_vector(rng, 2), complex_normal_vector(rng, 2, 1e-4),
                  complex_normal_vector(rng, 2), 1e-9};
    const StepOutcome o = env.step(act);
    for (int k = 0; k < 2; ++k)
      EXPECT_LE(std::norm(o.b_applied(k)) * c.tau_ul, o.harvested[static_cast<std::size_t>(k)] + 1e-12);
  }
}

TEST(Env, EpisodeLengthAndContracts) {
  Case3Config c = small(-100.0);
  c.episode_length = 2;
  AirCompEnv env(c, 9);
  env.reset();
  AgentActions act;
  act.agent1 = {zeros(2), zeros(2)};
  act.agent2 = {Eigen::VectorXcd::Zero(2), Eigen::VectorXcd::Zero(2), Eigen::VectorXcd::Ones(2), 0.0};
  EXPECT_THROW(env.step(act), ContractViolation);
  act.agent2.eta = 1.0;
  env.step(act);
  EXPECT_TRUE(env.step(act).done);
  EXPECT_THROW(env.step(act), ContractViolation);
}

TEST(Oracle, NoiselessWithAmpleEnergyReachesZero) {
  Case3Config c = small(-300.0);
  c.bs_power_budget = 1e6;
  AirCompEnv env(c, 10);
  env.reset();
  EXPECT_LE(grid_oracle_mse(c, env.true_channels(), 8).mse, 1e-6);
}

TEST(Oracle, BeatsRandomActionsAndRefinesMonotonically) {
  const Case3Config c = small(-110.0);
  AirCompEnv env(c, 11);
  env.reset();
  const auto& ch = env.true_channels();
  double prev = std::numeric_limits<double>::infinity();
  for (int r : {2, 4, 8, 16}) {
    const double m = grid_oracle_mse(c, ch, r).mse;
    EXPECT_LE(m, prev);
    prev = m;
  }
  Rng rng(12);
  for (int i = 0; i < 1000; ++i) {
    const RisConfig dl = random_config(rng, 2, 1);
    const RisConfig ul = random_config(rng, 2, 1);
    const Eigen::VectorXcd w = complex_normal_vector(rng, 2).normalized() * std::sqrt(c.bs_power_budget);
    const auto e = harvested_energy(w, effective(ch, dl), c.eh_efficiency, c.tau_dl);
    Eigen::VectorXcd b(2);
    for (int k = 0; k < 2; ++k)
      b(k) = std::polar(std::sqrt(e[static_cast<std::size_t>(k)] / c.tau_ul) * uniform01(rng), kTwoPi * uniform01(rng));
    const double eta = std::pow(10.0, -20.0 + 8.0 * uniform01(rng));
    const double m = aircomp_mse(effective(ch, ul), b, complex_normal_vector(rng, 2).normalized(), eta, c.noise_watts());
    EXPECT_LE(prev, m);
  }
}

TEST(Oracle, GuardRejectsLargeInstances) {
  Case3Config c = small(-100.0);
  c.topology.devices.push_back({4.0, 6.0, 0.0});
  AirCompEnv env(c, 13);
  env.reset();
  EXPECT_THROW(grid_oracle_mse(c, env.true_channels(), 4), EnumerationLimit);
}

TEST(Scales, PositiveAndFinite) {
  AirCompEnv env(small(-100.0), 14);
  env.reset();
  const ActionScales s = env.scales();
  EXPECT_GT(s.eta_ref, 0.0);
  ASSERT_EQ(s.b_max.size(), 2u);
  for (double b : s.b_max) EXPECT_TRUE(std::isfinite(b) && b > 0.0);
}

}  // namespace
}  // namespace risiort::aircomp
