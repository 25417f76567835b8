#include <gtest/gtest.h>

#include <cmath>
#include <complex>

#include "risiort/error.hpp"
#include "risiort/isac.hpp"

namespace risiort::isac {
namespace {

IsacConfig one_bs_one_user(const Eigen::VectorXcd& h) {
  IsacConfig c;
  c.antennas = static_cast<int>(h.size());
  c.user_channels = {{h}};
  c.target_angles = {0.0};
  c.angle_grid = default_angle_grid();
  c.desired_pattern = mainlobe_pattern(c.angle_grid, c.target_angles, 5.0 * kPi / 180.0);
  c.power_budget_dbm = 30.0;
  c.noise_power_dbm = 0.0;
  return c;
}

IsacConfig two_bs_instance(std::uint64_t seed) {
  Rng rng(seed);
  Topology t;
  t.bs_list = {{{-10.0, 0.0, 5.0}, 4}, {{10.0, 0.0, 5.0}, 4}};
  t.ris = {{0.0, 10.0, 5.0}, 4};
  t.devices = {{-3.0, 12.0, 0.0}, {4.0, 14.0, 0.0}};
  RisConfig ris;
  ris.phases.assign(4, 0.0);
  return config_from_topology(rng, t, LinkParams{}, ris, {-kPi / 6.0, kPi / 5.0}, 25.0);
}

SolverParams quick() {
  SolverParams sp;
  sp.iterations = 150;
  sp.restarts = 2;
  return sp;
}

TEST(Steering, BroadsideAndThirtyDegrees) {
  const Eigen::VectorXcd a0 = steering_vector(0.0, 3);
  for (Eigen::Index i = 0; i < 3; ++i) EXPECT_NEAR(std::abs(a0(i) - cd(1, 0)), 0.0, 1e-15);
  const Eigen::VectorXcd a = steering_vector(kPi / 6.0, 2);
  EXPECT_NEAR(std::abs(a(1) - cd(0, 1)), 0.0, 1e-15);
}

TEST(Steering, UnitModulusEntries) {
  for (double th = -1.5; th <= 1.5; th += 0.1) EXPECT_NEAR(steering_vector(th, 6).squaredNorm(), 6.0, 1e-12);
}

TEST(SumRate, MrtSingleUserHandValue) {
  Eigen::VectorXcd h(2);
  h << cd(0.6, -0.2), cd(0.1, 0.9);
  const IsacConfig c = one_bs_one_user(h);
  BeamformerSet w = zero_beamformers(c);
  w[0].col(0) = h.normalized() * std::sqrt(c.budget_watts());
  EXPECT_NEAR(sum_rate(c, w), std::log2(1.0 + c.budget_watts() * h.squaredNorm() / c.noise_watts()), 1e-12);
}

TEST(SumRate, ZeroBeamformersGiveZero) {
  Eigen::VectorXcd h = Eigen::VectorXcd::Ones(2);
  const IsacConfig c = one_bs_one_user(h);
  EXPECT_EQ(sum_rate(c, zero_beamformers(c)), 0.0);
}

TEST(SumRate, OrthogonalUsersDoNotInterfere) {
  IsacConfig c = one_bs_one_user(Eigen::VectorXcd::Ones(2));
  Eigen::VectorXcd h1(2), h2(2);
  h1 << cd(1, 0), cd(0, 0);
  h2 << cd(0, 0), cd(0.5, 0.5);
  c.users = 2;
  c.user_channels = {{h1}, {h2}};
  BeamformerSet w = zero_beamformers(c);
  w[0].col(0) = h1.normalized();
  w[0].col(1) = h2.normalized();
  const double n = c.noise_watts();
  EXPECT_NEAR(sum_rate(c, w), std::log2(1.0 + h1.squaredNorm() / n) + std::log2(1.0 + h2.squaredNorm() / n), 1e-12);
}

TEST(Beampattern, ScaledIdentityIsFlat) {
  const IsacConfig c = one_bs_one_user(Eigen::VectorXcd::Ones(2));
  BeamformerSet w = zero_beamformers(c);
  ASSERT_EQ(w[0].rows(), w[0].cols());
  w[0] = 0.3 * Eigen::MatrixXcd::Identity(2, 2);
  for (double p : beampattern(c, w)) EXPECT_NEAR(p, 0.09 * 2.0, 1e-12);
}

TEST(Beampattern, ExactMatchHasZeroError) {
  IsacConfig c = one_bs_one_user(Eigen::VectorXcd::Ones(2));
  BeamformerSet w = zero_beamformers(c);
  w[0](0, 0) = cd(0.4, 0.1);
  w[0](1, 1) = cd(-0.2, 0.3);
  c.desired_pattern = beampattern(c, w);
  EXPECT_NEAR(beampattern_error(c, w), 0.0, 1e-24);
}

TEST(Beampattern, ToyInstanceMatchesHandQuadraticForms) {
  IsacConfig c = one_bs_one_user(Eigen::VectorXcd::Ones(2));
  c.angle_grid = {-kPi / 6.0, 0.0, kPi / 6.0};
  c.desired_pattern = {0.0, 1.0, 0.0};
  BeamformerSet w = zero_beamformers(c);
  w[0] << cd(1, 0), cd(0, 0), cd(0, 0), cd(0, 1);
  // R = diag(1, 1) on column 0 row 0 and column 1 row 1; w = [[1,0],[0,j]].
  // P(theta) = |a0|^2 + |a1|^2 = 2 for every angle.
  const double alpha = 2.0;  // <d, P> / <d, d> = 2 / 1
  const double want = ((0.0 - 2.0) * (0.0 - 2.0) + (alpha - 2.0) * (alpha - 2.0) + 4.0) / 3.0;
  EXPECT_NEAR(beampattern_error(c, w), want, 1e-12);
}

TEST(Beampattern, MainlobeMask) {
  const auto grid = default_angle_grid();
  ASSERT_EQ(grid.size(), 181u);
  const auto d = mainlobe_pattern(grid, {0.0}, 5.0 * kPi / 180.0);
  int ones = 0;
  for (double v : d) ones += v == 1.0 ? 1 : 0;
  EXPECT_EQ(ones, 11);
}

TEST(Gradients, MatchCentralDifferences) {
  const IsacConfig c = two_bs_instance(1);
  Rng rng(2);
  BeamformerSet w = random_beamformers(rng, c);
  for (auto& m : w) m *= 0.7;
  const BeamformerSet gr = sum_rate_gradient(c, w);
  const BeamformerSet ge = beampattern_error_gradient(c, w);
  const double h = 1e-6 * std::sqrt(c.budget_watts());
  for (int trial = 0; trial < 12; ++trial) {
    const std::size_t m = static_cast<std::size_t>(trial % 2);
    const Eigen::Index i = trial % w[m].size();
    for (int part = 0; part < 2; ++part) {
      const cd step = part == 0 ? cd(h, 0) : cd(0, h);
      BeamformerSet up = w, dn = w;
      up[m].data()[i] += step;
      dn[m].data()[i] -= step;
      const double nr = (sum_rate(c, up) - sum_rate(c, dn)) / (2 * h);
      const double ne = (beampattern_error(c, up) - beampattern_error(c, dn)) / (2 * h);
      const double ar = part == 0 ? gr[m].data()[i].real() : gr[m].data()[i].imag();
      const double ae = part == 0 ? ge[m].data()[i].real() : ge[m].data()[i].imag();
      EXPECT_NEAR(ar, nr, 1e-5 * std::max(1.0, std::abs(nr)));
      EXPECT_NEAR(ae, ne, 1e-5 * std::max(std::abs(ne), 1e-3 * ge[m].norm()));
    }
  }
}

TEST(Tchebycheff, HandEvaluation) {
  const Reference ref{5.0, 0.0, 1.0, 1.0};
  EXPECT_DOUBLE_EQ(tchebycheff_scalarize({4.0, 2.0}, {0.5, 0.5}, ref), 1.0);
  EXPECT_DOUBLE_EQ(tchebycheff_scalarize({5.0, 0.0}, {0.5, 0.5}, ref), 0.0);
}

TEST(Tchebycheff, RateOnlyWeightIgnoresError) {
  const Reference ref{5.0, 0.0, 1.0, 1.0};
  EXPECT_DOUBLE_EQ(tchebycheff_scalarize({4.0, 2.0}, {1.0, 0.0}, ref),
                   tchebycheff_scalarize({4.0, 9.0}, {1.0, 0.0}, ref));
}

TEST(Dominance, FilterExamples) {
  EXPECT_EQ(non_dominated_filter({{1, 1}, {2, 0.5}}), (std::vector<ObjectivePair>{{2, 0.5}}));
  EXPECT_EQ(non_dominated_filter({{1, 1}, {2, 2}, {3, 3}}).size(), 3u);
  EXPECT_EQ(non_dominated_filter({{1, 1}, {1, 1}}).size(), 1u);
  EXPECT_FALSE(dominates({1, 1}, {1, 1}));
}

TEST(Projection, RescalesOntoTheBudget) {
  const IsacConfig c = two_bs_instance(3);
  Rng rng(4);
  BeamformerSet w = random_beamformers(rng, c);
  w[0] *= 2.0;
  w[1] *= 0.5;
  const Eigen::MatrixXcd inside = w[1];
  project(c, w);
  EXPECT_NEAR(w[0].squaredNorm(), c.budget_watts(), 1e-12 * c.budget_watts());
  EXPECT_EQ(w[1], inside);
  EXPECT_TRUE(feasible(c, w));
}

TEST(Solver, ExtremesBeatRandomFeasiblePoints) {
  const IsacConfig c = two_bs_instance(5);
  Rng rng(6);
  const Solution rate = solve_scalarized(rng, c, {1.0, 0.0}, quick());
  const Solution err = solve_scalarized(rng, c, {0.0, 1.0}, quick());
  EXPECT_TRUE(feasible(c, rate.w));
  EXPECT_TRUE(feasible(c, err.w));
  for (int i = 0; i < 100; ++i) {
    BeamformerSet w = random_beamformers(rng, c);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (auto& m : w) m *= std::sqrt(u(rng));
    const ObjectivePair o = evaluate(c, w);
    EXPECT_GE(rate.objectives.sum_rate, o.sum_rate);
    EXPECT_LE(err.objectives.pattern_error, o.pattern_error);
  }
}

TEST(Sweep, FrontIsNonDominatedAndAnchoredAtTheExtremes) {
  const IsacConfig c = two_bs_instance(7);
  Rng rng(8);
  const SolverParams sp = quick();
  const IdealPoint ip = ideal_point(rng, c, sp);
  const auto entries = sweep(rng, c, uniform_weights(6), sp, ip);
  const auto front = pareto_front(entries);
  for (const auto& a : front)
    for (const auto& b : front) EXPECT_FALSE(dominates(a, b));
  EXPECT_GE(front.back().sum_rate, ip.rate_extreme.objectives.sum_rate * 0.95);
  EXPECT_LE(front.front().pattern_error,
            ip.error_extreme.objectives.pattern_error + 0.05 * ip.reference.norm_error);
}

TEST(Sweep, DeterministicForAFixedSeed) {
  const IsacConfig c = two_bs_instance(9);
  Rng a(10), b(10);
  EXPECT_EQ(pareto_sweep(a, c, uniform_weights(3), quick()), pareto_sweep(b, c, uniform_weights(3), quick()));
}

TEST(Config, MismatchedChannelsAreRejected) {
  IsacConfig c = one_bs_one_user(Eigen::VectorXcd::Ones(2));
  c.user_channels[0][0] = Eigen::VectorXcd::Ones(3);
  EXPECT_THROW(validate_config(c), ConfigError);
}

}  // namespace
}  // namespace risiort::isac
