#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "risiort/channel.hpp"
#include "risiort/error.hpp"
#include "risiort/ris.hpp"

namespace risiort {
namespace {

RisConfig phases(std::vector<double> p) {
  RisConfig r;
  r.phases = std::move(p);
  return r;
}

TEST(Quantize, NearestCodebookPoint) {
  const RisConfig q = quantize_phases(phases({0.26 * kPi}), 2);
  EXPECT_EQ(q.phases[0], kPi / 2.0);
  EXPECT_EQ(q.bit_depth, 2);
}

TEST(Quantize, ExactTieGoesToSmallerIndex) {
  EXPECT_EQ(quantize_phases(phases({kPi / 4.0}), 2).phases[0], 0.0);
}

TEST(Quantize, WrapTieCountsZeroAsSmaller) {
  EXPECT_EQ(quantize_phases(phases({7.0 * kPi / 4.0}), 2).phases[0], 0.0);
}

TEST(Quantize, CodebookPointsAreFixedPoints) {
  for (int bits = 1; bits <= 5; ++bits)
    for (int k = 0; k < (1 << bits); ++k) {
      const RisConfig c = config_from_indices({k}, bits);
      EXPECT_EQ(quantize_phases(c, bits).phases, c.phases);
      EXPECT_EQ(phase_indices(c), std::vector<int>{k});
    }
}

TEST(Quantize, ResultIsAlwaysOnTheCodebook) {
  Rng rng(1);
  for (int i = 0; i < 200; ++i) {
    const RisConfig c = random_config(rng, 6, std::nullopt);
    const RisConfig q = quantize_phases(c, 3);
    for (double p : q.phases) {
      const double k = p / (kTwoPi / 8.0);
      EXPECT_EQ(k, std::round(k));
      EXPECT_GE(p, 0.0);
      EXPECT_LT(p, kTwoPi);
    }
  }
}

TEST(RandomConfig, OneBitDrawsAreBalanced) {
  Rng rng(2);
  const int draws = 100000;
  int zeros = 0;
  for (int i = 0; i < draws; ++i) zeros += random_config(rng, 1, 1).phases[0] == 0.0 ? 1 : 0;
  EXPECT_NEAR(static_cast<double>(zeros) / draws, 0.5, 0.01);
}

TEST(RandomConfig, EmptyAndContinuousRanges) {
  Rng rng(3);
  EXPECT_TRUE(random_config(rng, 0, 2).phases.empty());
  for (int i = 0; i < 1000; ++i)
    for (double p : random_config(rng, 4, std::nullopt).phases) {
      EXPECT_GE(p, 0.0);
      EXPECT_LT(p, kTwoPi);
    }
}

ChannelSet scalar_set(cd direct, cd g, cd h) {
  ChannelSet cs;
  cs.h_direct = Eigen::VectorXcd::Constant(1, direct);
  cs.g_bs_ris = Eigen::MatrixXcd::Constant(1, 1, g);
  cs.h_ris_dev = Eigen::VectorXcd::Constant(1, h);
  return cs;
}

const RisObjective kGain = [](const Eigen::VectorXcd& h) { return h.squaredNorm(); };

TEST(BruteForce, SingleElementOneBitHandEnumeration) {
  const ChannelSet cs = scalar_set(cd(1.0, 0.5), cd(0.4, -0.2), cd(0.8, 0.9));
  const cd cascade = std::conj(cs.g_bs_ris(0, 0)) * cs.h_ris_dev(0);
  const double at0 = std::norm(cs.h_direct(0) + cascade);
  const double atpi = std::norm(cs.h_direct(0) - cascade);
  const RisSearchResult r = brute_force_best_config(cs, 1, kGain);
  EXPECT_EQ(r.config.phases[0], at0 >= atpi ? 0.0 : kPi);
  EXPECT_NEAR(r.objective, std::max(at0, atpi), 1e-12);
}

TEST(BruteForce, ConstantObjectiveReturnsFirstConfig) {
  Rng rng(4);
  Topology t;
  t.bs_list = {{{0, 0, 3}, 2}};
  t.ris = {{4, 4, 3}, 4};
  t.devices = {{6, 1, 0}};
  const ChannelSet cs = sample_channel(rng, t, LinkParams{}, 0, 0);
  const RisSearchResult r = brute_force_best_config(cs, 2, [](const Eigen::VectorXcd&) { return 1.0; });
  EXPECT_EQ(phase_indices(r.config), std::vector<int>(4, 0));
}

TEST(BruteForce, MatchesIndependentNestedEnumeration) {
  Rng rng(5);
  Topology t;
  t.bs_list = {{{0, 0, 3}, 2}};
  t.ris = {{4, 4, 3}, 8};
  t.devices = {{6, 1, 0}};
  const ChannelSet cs = sample_channel(rng, t, LinkParams{}, 0, 0);
  const RisSearchResult r = brute_force_best_config(cs, 2, kGain);

  // Independent enumerator: explicit base-4 digits, objective formed by hand.
  const std::vector<cd> unit{cd(1, 0), cd(0, 1), cd(-1, 0), cd(0, -1)};
  double best = -1.0;
  std::vector<int> best_digits;
  std::vector<int> d(8, 0);
  for (int code = 0; code < 65536; ++code) {
    for (int n = 0, c = code; n < 8; ++n, c /= 4) d[7 - n] = c % 4;
    double v = 0.0;
    for (Eigen::Index m = 0; m < 2; ++m) {
      cd acc = cs.h_direct(m);
      for (int n = 0; n < 8; ++n) acc += std::conj(cs.g_bs_ris(n, m)) * unit[d[n]] * cs.h_ris_dev(n);
      v += std::norm(acc);
    }
    if (v > best) {
      best = v;
      best_digits = d;
    }
  }
  EXPECT_NEAR(r.objective, best, 1e-12 * best);
  EXPECT_EQ(phase_indices(r.config), best_digits);
}

TEST(BruteForce, GuardRejectsOversizedSearch) {
  ChannelSet cs;
  cs.h_direct = Eigen::VectorXcd::Zero(1);
  cs.g_bs_ris = Eigen::MatrixXcd::Zero(11, 1);
  cs.h_ris_dev = Eigen::VectorXcd::Zero(11);
  EXPECT_THROW(brute_force_best_config(cs, 2, kGain), EnumerationLimit);
}

TEST(AlignPhases, CoPhasesEveryCascadeWithDirect) {
  Rng rng(6);
  Topology t;
  t.bs_list = {{{0, 0, 3}, 1}};
  t.ris = {{4, 4, 3}, 5};
  t.devices = {{6, 1, 0}};
  const ChannelSet cs = sample_channel(rng, t, LinkParams{}, 0, 0);
  const RisConfig a = align_phases(cs);
  const Eigen::VectorXcd v = reflection_vector(a);
  const double ref = std::arg(cs.h_direct(0));
  for (Eigen::Index n = 0; n < 5; ++n) {
    const cd term = std::conj(cs.g_bs_ris(n, 0)) * v(n) * cs.h_ris_dev(n);
    EXPECT_NEAR(std::remainder(std::arg(term) - ref, kTwoPi), 0.0, 1e-9);
  }
}

}  // namespace
}  // namespace risiort
