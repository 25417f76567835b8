#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <random>

#include "risiort/channel.hpp"
#include "risiort/error.hpp"
#include "risiort/geometry.hpp"

namespace risiort {
namespace {

Topology wall_map() {
  Topology t;
  t.bs_list = {{{0.0, 0.0, 0.0}, 2}};
  t.ris = {{5.0, 5.0, 0.0}, 2};
  t.devices = {{10.0, 0.0, 0.0}};
  t.obstacles = {{{4.0, -1.0, 0.0}, {6.0, 1.0, 3.0}}};
  return t;
}

TEST(Geometry, SegmentThroughWallIsBlocked) {
  EXPECT_TRUE(los_blocked(wall_map(), {0.0, 0.0, 0.0}, {10.0, 0.0, 0.0}));
}

TEST(Geometry, SegmentAwayFromObstaclesIsClear) {
  Topology t = wall_map();
  EXPECT_FALSE(los_blocked(t, {0.0, 5.0, 0.0}, {10.0, 5.0, 0.0}));
  t.obstacles.clear();
  EXPECT_FALSE(los_blocked(t, {0.0, 0.0, 0.0}, {10.0, 0.0, 0.0}));
}

TEST(Geometry, EndpointOnBoxEdgeCountsAsBlocked) {
  EXPECT_TRUE(los_blocked(wall_map(), {0.0, 0.0, 0.0}, {4.0, 0.0, 0.0}));
  EXPECT_TRUE(los_blocked(wall_map(), {4.0, 3.0, 0.0}, {4.0, 1.0, 0.0}));
}

TEST(Geometry, ValidateTopologyRejectsMissingBaseStation) {
  Topology t = wall_map();
  t.bs_list.clear();
  EXPECT_THROW(validate_topology(t), ConfigError);
}

TEST(PathLoss, HandEvaluatedPowerLaw) {
  LinkParams lp;
  lp.ref_loss_db = 30.0;
  lp.exponent = {3.5, 3.5, 3.5};
  EXPECT_NEAR(path_loss(1.0, lp, LinkClass::kBsDevice), 1e-3, 1e-15);
  EXPECT_NEAR(path_loss(10.0, lp, LinkClass::kBsDevice), 3.1622776601683795e-7, 1e-19);
}

TEST(PathLoss, DistanceIsClampedAtTheFloor) {
  LinkParams lp;
  EXPECT_EQ(path_loss(0.01, lp, LinkClass::kBsRis), path_loss(kMinDistance, lp, LinkClass::kBsRis));
}

TEST(PathLoss, MonotoneNonIncreasingInDistance) {
  LinkParams lp;
  double prev = path_loss(kMinDistance, lp, LinkClass::kRisDevice);
  for (double d = 0.75; d < 200.0; d *= 1.3) {
    const double now = path_loss(d, lp, LinkClass::kRisDevice);
    EXPECT_LE(now, prev);
    prev = now;
  }
}

TEST(Ula, BroadsideIsAllOnes) {
  const Eigen::VectorXcd a = ula_response(4, 0.0);
  for (Eigen::Index i = 0; i < 4; ++i) EXPECT_NEAR(std::abs(a(i) - cd(1.0, 0.0)), 0.0, 1e-15);
}

TEST(Ula, TwoElementsAtThirtyDegrees) {
  const Eigen::VectorXcd a = ula_response(2, std::sin(kPi / 6.0));
  EXPECT_NEAR(std::abs(a(0) - cd(1.0, 0.0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(a(1) - cd(0.0, 1.0)), 0.0, 1e-15);
}

Topology single_link(bool blocked) {
  Topology t;
  t.bs_list = {{{0.0, 0.0, 3.0}, 2}};
  t.ris = {{3.0, 4.0, 3.0}, 3};
  t.devices = {{6.0, 0.0, 0.0}};
  if (blocked) t.obstacles = {{{2.5, -1.0, 0.0}, {3.5, 1.0, 5.0}}};
  return t;
}

TEST(SampleChannel, PureLosLimitIsDeterministic) {
  LinkParams lp;
  lp.rician_k = {1e6, 1e6, 1e6};
  Rng a(1);
  Rng b(2);
  const ChannelSet x = sample_channel(a, single_link(false), lp, 0, 0);
  const ChannelSet y = sample_channel(b, single_link(false), lp, 0, 0);
  EXPECT_EQ(x.h_direct, y.h_direct);
  EXPECT_EQ(x.g_bs_ris, y.g_bs_ris);
  EXPECT_EQ(x.h_ris_dev, y.h_ris_dev);
  EXPECT_EQ(x.h_direct, x.los_direct);
}

TEST(SampleChannel, RayleighMeanPowerMatchesPathLoss) {
  LinkParams lp;
  lp.rician_k = {0.0, 0.0, 0.0};
  const Topology t = single_link(false);
  Rng rng(3);
  const int draws = 100000;
  double acc = 0.0;
  for (int i = 0; i < draws; ++i) acc += std::norm(sample_channel(rng, t, lp, 0, 0).h_direct(0));
  const double want = path_loss(distance(t.bs_list[0].position, t.devices[0]), lp, LinkClass::kBsDevice);
  EXPECT_NEAR(acc / draws / want, 1.0, 0.02);
}

TEST(SampleChannel, BlockedDirectLinkHasNoLosComponent) {
  LinkParams lp;
  lp.rician_k = {10.0, 10.0, 10.0};
  Rng rng(4);
  const ChannelSet cs = sample_channel(rng, single_link(true), lp, 0, 0);
  EXPECT_EQ(cs.los_direct.norm(), 0.0);
  EXPECT_EQ(cs.direct_stats.rician_k, 0.0);
  EXPECT_GT(cs.h_direct.norm(), 0.0);
}

TEST(SampleChannel, BlockageLossAttenuatesTheDirectPower) {
  LinkParams lp;
  lp.blockage_loss_db = 20.0;
  Rng a(5);
  Rng b(5);
  const ChannelSet open = sample_channel(a, single_link(false), lp, 0, 0);
  const ChannelSet shut = sample_channel(b, single_link(true), lp, 0, 0);
  EXPECT_NEAR(shut.direct_stats.power / open.direct_stats.power, 0.01, 1e-12);
}

TEST(SampleChannels, BsRisBlockIsShared) {
  Topology t = single_link(false);
  t.devices.push_back({7.0, 2.0, 0.0});
  Rng rng(6);
  auto group = sample_channels(rng, t, LinkParams{}, 0);
  ASSERT_EQ(group.size(), 2u);
  EXPECT_EQ(group[0].g_bs_ris, group[1].g_bs_ris);
  age_channels(rng, group, {0.9, 1.0});
  EXPECT_EQ(group[0].g_bs_ris, group[1].g_bs_ris);
}

ChannelSet scalar_set(cd direct, cd g, cd h) {
  ChannelSet cs;
  cs.h_direct = Eigen::VectorXcd::Constant(1, direct);
  cs.g_bs_ris = Eigen::MatrixXcd::Constant(1, 1, g);
  cs.h_ris_dev = Eigen::VectorXcd::Constant(1, h);
  return cs;
}

TEST(EffectiveChannel, NoReflectedPathLeavesDirect) {
  Rng rng(7);
  ChannelSet cs = sample_channel(rng, single_link(false), LinkParams{}, 0, 0);
  cs.h_ris_dev.setZero();
  RisConfig r;
  r.phases = {0.3, 1.0, 2.0};
  EXPECT_EQ(effective_channel(cs, r), cs.h_direct);
}

TEST(EffectiveChannel, IdentityReflectionSumsCascades) {
  ChannelSet cs;
  cs.h_direct = Eigen::VectorXcd::Zero(1);
  cs.g_bs_ris = Eigen::MatrixXcd(3, 1);
  cs.g_bs_ris << cd(1, 2), cd(-0.5, 0.25), cd(0, -1);
  cs.h_ris_dev = Eigen::VectorXcd(3);
  cs.h_ris_dev << cd(0.5, 0), cd(2, 1), cd(-1, 1);
  RisConfig r;
  r.phases = {0.0, 0.0, 0.0};
  cd want{};
  for (int n = 0; n < 3; ++n) want += std::conj(cs.g_bs_ris(n, 0)) * cs.h_ris_dev(n);
  EXPECT_NEAR(std::abs(effective_channel(cs, r)(0) - want), 0.0, 1e-14);
}

TEST(EffectiveChannel, ScalarOptimumAgreesWithGridSearch) {
  const ChannelSet cs = scalar_set(cd(0.3, -0.7), cd(0.9, 0.4), cd(-0.2, 1.1));
  // Independent oracle: 360-point scan.
  double best = -1.0;
  double best_theta = 0.0;
  for (int i = 0; i < 360; ++i) {
    const double th = kTwoPi * i / 360.0;
    const double v = std::abs(cs.h_direct(0) + std::conj(cs.g_bs_ris(0, 0)) * std::polar(1.0, th) * cs.h_ris_dev(0));
    if (v > best) {
      best = v;
      best_theta = th;
    }
  }
  const double closed = std::arg(cs.h_direct(0)) - std::arg(std::conj(cs.g_bs_ris(0, 0)) * cs.h_ris_dev(0));
  RisConfig r;
  r.phases = {std::fmod(closed + 2.0 * kTwoPi, kTwoPi)};
  const double at_closed = std::abs(effective_channel(cs, r)(0));
  EXPECT_GE(at_closed, best - 1e-12);
  const double gap = std::remainder(r.phases[0] - best_theta, kTwoPi);
  EXPECT_LE(std::abs(gap), kTwoPi / 360.0);
}

TEST(EffectiveChannel, SizeMismatchIsAContractViolation) {
  Rng rng(8);
  const ChannelSet cs = sample_channel(rng, single_link(false), LinkParams{}, 0, 0);
  RisConfig r;
  r.phases = {0.0};
  EXPECT_THROW(effective_channel(cs, r), ContractViolation);
}

TEST(Aging, RhoOneIsIdentity) {
  Rng rng(9);
  const ChannelSet cs = sample_channel(rng, single_link(false), LinkParams{}, 0, 0);
  const ChannelSet aged = age_channel(rng, cs, {1.0, 0.0});
  EXPECT_EQ(aged.h_direct, cs.h_direct);
  EXPECT_EQ(aged.g_bs_ris, cs.g_bs_ris);
  EXPECT_EQ(aged.h_ris_dev, cs.h_ris_dev);
}

TEST(Aging, RhoZeroDecorrelates) {
  LinkParams lp;
  lp.rician_k = {0.0, 0.0, 0.0};
  Topology t = single_link(false);
  t.bs_list[0].antennas = 1;
  Rng rng(10);
  ChannelSet cs = sample_channel(rng, t, lp, 0, 0);
  const int steps = 50000;
  cd lag{};
  double power = 0.0;
  cd prev = cs.h_direct(0);
  for (int i = 0; i < steps; ++i) {
    cs = age_channel(rng, cs, {0.0, 0.0});
    lag += cs.h_direct(0) * std::conj(prev);
    power += std::norm(cs.h_direct(0));
    prev = cs.h_direct(0);
  }
  EXPECT_LT(std::abs(lag) / power, 0.02);
}

// A single chain at rho=0.99 has only about 1e3 effective samples of |h|^2
// in 1e5 steps, so the power estimate pools 16 independent antennas.
TEST(Aging, LagOneAutocorrelationTracksRho) {
  LinkParams lp;
  lp.rician_k = {0.0, 0.0, 0.0};
  Topology t = single_link(false);
  t.bs_list[0].antennas = 16;
  Rng rng(11);
  ChannelSet cs = sample_channel(rng, t, lp, 0, 0);
  const double nominal = cs.direct_stats.power;
  cd lag{};
  double power = 0.0;
  Eigen::VectorXcd prev = cs.h_direct;
  const int steps = 100000;
  for (int i = 0; i < steps; ++i) {
    cs = age_channel(rng, cs, {0.99, 1.0});
    lag += prev.dot(cs.h_direct);
    power += cs.h_direct.squaredNorm();
    prev = cs.h_direct;
  }
  const double rho_hat = lag.real() / power;
  EXPECT_GE(rho_hat, 0.98);
  EXPECT_LE(rho_hat, 1.0);
  EXPECT_LT(std::abs(power / (16.0 * steps) / nominal - 1.0), 0.03);
}

TEST(Aging, RicianChainKeepsItsLosMean) {
  LinkParams lp;
  lp.rician_k = {5.0, 5.0, 5.0};
  Topology t = single_link(false);
  t.bs_list[0].antennas = 1;
  Rng rng(12);
  ChannelSet cs = sample_channel(rng, t, lp, 0, 0);
  cd mean{};
  const int steps = 50000;
  for (int i = 0; i < steps; ++i) {
    cs = age_channel(rng, cs, {0.9, 1.0});
    mean += cs.h_direct(0);
  }
  mean /= steps;
  EXPECT_LT(std::abs(mean - cs.los_direct(0)) / std::abs(cs.los_direct(0)), 0.05);
}

TEST(Aging, RhoOutsideUnitIntervalIsRejected) {
  Rng rng(13);
  const ChannelSet cs = sample_channel(rng, single_link(false), LinkParams{}, 0, 0);
  EXPECT_THROW(age_channel(rng, cs, {1.5, 0.0}), ContractViolation);
}

TEST(Csi, ZeroVarianceIsExact) {
  Rng rng(14);
  const ChannelSet cs = sample_channel(rng, single_link(false), LinkParams{}, 0, 0);
  const ChannelSet est = estimate_csi(rng, cs, {0.0, false});
  EXPECT_EQ(est.h_direct, cs.h_direct);
  EXPECT_EQ(est.g_bs_ris, cs.g_bs_ris);
  EXPECT_EQ(est.h_ris_dev, cs.h_ris_dev);
}

TEST(Csi, ErrorVarianceMatchesMonteCarlo) {
  const ChannelSet cs = scalar_set(cd(0.1, 0.2), cd(0.3, 0.4), cd(0.5, 0.6));
  Rng rng(15);
  const int draws = 100000;
  double acc = 0.0;
  for (int i = 0; i < draws; ++i) acc += std::norm(estimate_csi(rng, cs, {0.01, false}).h_direct(0) - cs.h_direct(0));
  EXPECT_NEAR(acc / draws, 0.01, 0.0003);
}

TEST(Csi, NegativeVarianceIsRejected) {
  Rng rng(16);
  const ChannelSet cs = scalar_set(cd(1, 0), cd(1, 0), cd(1, 0));
  EXPECT_THROW(estimate_csi(rng, cs, {-1.0, false}), ContractViolation);
}

}  // namespace
}  // namespace risiort
