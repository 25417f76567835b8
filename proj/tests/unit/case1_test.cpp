#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "risiort/case1.hpp"
#include "risiort/error.hpp"

namespace risiort::case1 {
namespace {

TEST(NomaRate, HandEvaluatedTwoRobotInstance) {
  // Robot 1 is the weak one and is decoded first.
  const auto r = sum_rate_noma({1.0, 0.25}, {1.0, 4.0}, {1, 0}, 1.0);
  EXPECT_NEAR(r[1], std::log2(1.0 + 1.0 / 1.25), 1e-12);
  EXPECT_NEAR(r[0], 1.0, 1e-12);
}

TEST(NomaRate, SingleRobotAndZeroPower) {
  EXPECT_NEAR(sum_rate_noma({0.3}, {2.0}, {0}, 0.1)[0], std::log2(1.0 + 6.0), 1e-12);
  for (double r : sum_rate_noma({1.0, 2.0}, {0.0, 0.0}, {0, 1}, 1.0)) EXPECT_EQ(r, 0.0);
}

TEST(OmaRate, SingleRobotMatchesNoma) {
  EXPECT_NEAR(sum_rate_oma({0.3}, {2.0}, 0.1)[0], sum_rate_noma({0.3}, {2.0}, {0}, 0.1)[0], 1e-12);
}

TEST(OmaRate, SymmetricRobotsGetEqualRates) {
  const auto r = sum_rate_oma({0.7, 0.7}, {1.5, 1.5}, 0.2);
  EXPECT_EQ(r[0], r[1]);
}

TEST(EnergyEfficiency, ArithmeticAndScaleInvariance) {
  EXPECT_DOUBLE_EQ(energy_efficiency(1e6, 100.0), 1e4);
  EXPECT_DOUBLE_EQ(energy_efficiency(2e6, 200.0), energy_efficiency(1e6, 100.0));
  EXPECT_THROW(energy_efficiency(1.0, 0.0), ContractViolation);
}

TEST(Rewards, LocalAndGlobalComposition) {
  const RewardWeights w{1.0, 0.1, 10.0};
  EXPECT_DOUBLE_EQ(local_reward(0.0, false, w), -0.1);
  EXPECT_DOUBLE_EQ(local_reward(2.0, true, w), 2.0 - 0.1 + 10.0);
  EXPECT_DOUBLE_EQ(global_reward({1.5, 2.5}), 4.0);
}

TEST(Rewards, GlobalRewardIsPermutationInvariant) {
  Rng rng(1);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  for (int i = 0; i < 100; ++i) {
    std::vector<double> r{u(rng), u(rng), u(rng)};
    const double a = global_reward(r);
    std::reverse(r.begin(), r.end());
    EXPECT_NEAR(global_reward(r), a, 1e-12);
  }
}

TEST(NomaVsOma, ExhaustiveSearchNeverFavoursOma) {
  Rng rng(2);
  std::uniform_real_distribution<double> lg(-12.0, -6.0);
  const std::vector<double> levels{0.0, 0.01, 0.05, 0.1};
  for (int i = 0; i < 100; ++i) {
    const std::vector<double> g{std::pow(10.0, lg(rng)), std::pow(10.0, lg(rng))};
    EXPECT_GE(exhaustive_max_ee(g, levels, 1.0, 1e-11, 0.1, AccessMode::kNoma),
              exhaustive_max_ee(g, levels, 1.0, 1e-11, 0.1, AccessMode::kOma));
  }
}

TEST(GainOrder, WeakestFirstAndStable) {
  EXPECT_EQ(gain_sorted_order({3.0, 1.0, 2.0}), (std::vector<int>{1, 2, 0}));
  EXPECT_EQ(gain_sorted_order({1.0, 1.0}), (std::vector<int>{0, 1}));
}

TEST(GlobalActions, SizeAndDecoding) {
  const GlobalActionSpace s(2, 1, 2);
  EXPECT_EQ(s.size(), 8u);
  const GlobalAction a = s.decode(5);
  EXPECT_EQ(a.ris_phase_indices, (std::vector<int>{0, 1}));
  EXPECT_EQ(a.decoding_order.size(), 2u);
  EXPECT_THROW(GlobalActionSpace(12, 2, 2), ConfigError);
}

Case1Config corridor() {
  Case1Config c;
  c.topology.bs_list = {{{2.5, -3.0, 5.0}, 2}};
  c.topology.ris = {{2.5, 7.0, 3.0}, 2};
  c.topology.devices = {{0.5, 0.5, 0.0}, {4.5, 0.5, 0.0}};
  c.topology.obstacles = {{{1.0, 1.0, 0.0}, {2.0, 2.0, 3.0}}};
  c.destinations = {{0.5, 1.5, 0.0}, {4.5, 4.5, 0.0}};
  c.area = Area{{0.0, 0.0, 0.0}, {5.0, 5.0, 0.0}};
  c.ris_bits = 1;
  return c;
}

GlobalAction zero_global() { return {{0, 0}, {}}; }

TEST(Env, ResetIsDeterministicPerSeed) {
  TrajectoryEnv a(corridor(), 7);
  TrajectoryEnv b(corridor(), 7);
  const Observation x = a.reset();
  const Observation y = b.reset();
  EXPECT_EQ(x.global, y.global);
  EXPECT_EQ(x.local, y.local);
}

TEST(Env, SingleRobotGlobalAndLocalPositionsCoincide) {
  Case1Config c = corridor();
  c.topology.devices.resize(1);
  c.destinations.resize(1);
  TrajectoryEnv env(c, 3);
  const Observation o = env.reset();
  ASSERT_EQ(o.global.size(), 3u);
  EXPECT_EQ(o.global[0], o.local[0][2]);
  EXPECT_EQ(o.global[1], o.local[0][3]);
  EXPECT_EQ(o.global[2], o.local[0][4]);
}

TEST(Env, AdjacentRobotArrivesAndCollectsBonusOnce) {
  TrajectoryEnv env(corridor(), 4);
  env.reset();
  const RewardWeights& w = env.config().reward_weights;
  StepResult r = env.step(zero_global(), {{Heading::kN, 0}, {Heading::kStay, 0}});
  EXPECT_TRUE(r.arrived_now[0]);
  EXPECT_TRUE(env.robots()[0].arrived);
  EXPECT_DOUBLE_EQ(r.local_rewards[0], -w.time_penalty_w + w.goal_bonus);
  r = env.step(zero_global(), {{Heading::kN, 0}, {Heading::kStay, 0}});
  EXPECT_FALSE(r.arrived_now[0]);
  EXPECT_EQ(r.local_rewards[0], 0.0);
}

TEST(Env, MoveIntoWallKeepsPositionButChargesMotion) {
  Case1Config c = corridor();
  c.topology.devices[0] = {1.5, 0.5, 0.0};
  c.destinations[0] = {3.5, 3.5, 0.0};
  TrajectoryEnv env(c, 5);
  env.reset();
  env.step(zero_global(), {{Heading::kN, 0}, {Heading::kStay, 0}});
  EXPECT_EQ(env.robots()[0].position, (Position{1.5, 0.5, 0.0}));
  EXPECT_DOUBLE_EQ(env.robots()[0].cumulative_energy, (c.motion_power + c.circuit_power) * c.decision_interval);
}

TEST(Env, MoveLeavingTheAreaIsBlocked) {
  TrajectoryEnv env(corridor(), 6);
  env.reset();
  env.step(zero_global(), {{Heading::kStay, 0}, {Heading::kE, 0}});
  EXPECT_EQ(env.robots()[1].position, (Position{4.5, 0.5, 0.0}));
}

TEST(Env, NullActionGivesZeroGlobalAndTimePenaltyLocal) {
  TrajectoryEnv env(corridor(), 7);
  env.reset();
  const StepResult r = env.step(zero_global(), {{Heading::kStay, 0}, {Heading::kStay, 0}});
  EXPECT_EQ(r.global_reward, 0.0);
  for (double l : r.local_rewards) EXPECT_DOUBLE_EQ(l, -env.config().reward_weights.time_penalty_w);
}

TEST(Env, GlobalRewardEqualsSumOfReportedRates) {
  TrajectoryEnv env(corridor(), 8);
  env.reset();
  const StepResult r = env.step(zero_global(), {{Heading::kStay, 1}, {Heading::kStay, 2}});
  EXPECT_DOUBLE_EQ(r.global_reward, std::accumulate(r.rates.begin(), r.rates.end(), 0.0));
  EXPECT_GT(r.global_reward, 0.0);
}

TEST(Env, DeadlineEndsTheEpisode) {
  Case1Config c = corridor();
  c.deadline = 3;
  TrajectoryEnv env(c, 9);
  env.reset();
  for (int i = 0; i < 3; ++i) env.step(zero_global(), {{Heading::kStay, 0}, {Heading::kStay, 0}});
  EXPECT_TRUE(env.done());
  EXPECT_THROW(env.step(zero_global(), {{Heading::kStay, 0}, {Heading::kStay, 0}}), ContractViolation);
}

TEST(Env, InvalidDecodingOrderIsRejected) {
  TrajectoryEnv env(corridor(), 10);
  env.reset();
  EXPECT_THROW(env.step({{0, 0}, {0, 0}}, {{Heading::kStay, 0}, {Heading::kStay, 0}}), ContractViolation);
}

TEST(Config, PowerLevelAboveBudgetIsRejected) {
  Case1Config c = corridor();
  c.max_power_dbm = 10.0;
  c.power_levels = {0.0, 0.05};
  EXPECT_THROW(validate_config(c), ConfigError);
}

TEST(Config, StartInsideObstacleIsRejected) {
  Case1Config c = corridor();
  c.topology.devices[0] = {1.5, 1.5, 0.0};
  EXPECT_THROW(validate_config(c), ConfigError);
}

TEST(ExhaustivePolicy, EfficiencyNonDecreasingInBudget) {
  Case1Config c = corridor();
  c.topology.obstacles.clear();
  c.destinations = {{2.5, 0.5, 0.0}, {4.5, 2.5, 0.0}};
  c.power_levels = {0.0, 0.005, 0.01};
  double prev = 0.0;
  for (double dbm : {10.0, 20.0, 30.0}) {
    c.max_power_dbm = dbm;
    const double ee = exhaustive_policy_ee(c, 11);
    EXPECT_GE(ee, prev);
    prev = ee;
  }
}

}  // namespace
}  // namespace risiort::case1
