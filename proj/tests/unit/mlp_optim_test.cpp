#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "risiort/error.hpp"
#include "risiort/learn/mlp.hpp"
#include "risiort/learn/optim.hpp"

namespace risiort::learn {
namespace {

Eigen::MatrixXd uniform(Rng& rng, Eigen::Index r, Eigen::Index c) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
  return m;
}

Eigen::VectorXd col(Eigen::Index n, double v) { return Eigen::VectorXd::Constant(n, v); }

void jitter_biases(Mlp& net, Rng& rng) {
  std::uniform_real_distribution<double> u(-0.1, 0.1);
  for (auto& l : net.weights())
    for (Eigen::Index i = 0; i < l.b.size(); ++i) l.b(i) = u(rng);
}

TEST(Mlp, ZeroNetOutputsZero) {
  const Mlp net({3, 5, 2}, OutputActivation::kLinear);
  EXPECT_EQ(net.forward(col(3, 1.0)), Eigen::VectorXd::Zero(2));
}

TEST(Mlp, OneOneOneHandComposite) {
  Mlp net({1, 1, 1}, OutputActivation::kLinear);
  auto w = net.weights();
  w[0].w(0, 0) = 2.0;
  w[0].b(0) = -1.0;
  w[1].w(0, 0) = 3.0;
  w[1].b(0) = 0.5;
  net.set_weights(w);
  EXPECT_DOUBLE_EQ(net.forward(col(1, 1.5))(0), 3.0 * 2.0 + 0.5);
  EXPECT_DOUBLE_EQ(net.forward(col(1, 0.25))(0), 0.5);  // ReLU closed
  Mlp squashed({1, 1, 1}, OutputActivation::kTanh);
  squashed.set_weights(w);
  EXPECT_DOUBLE_EQ(squashed.forward(col(1, 1.5))(0), std::tanh(6.5));
}

TEST(Mlp, InitialWeightsRespectFanInBound) {
  Rng rng(1);
  const Mlp net({16, 9, 4}, OutputActivation::kLinear, rng);
  EXPECT_LE(net.weights()[0].w.cwiseAbs().maxCoeff(), 0.25);
  EXPECT_LE(net.weights()[1].w.cwiseAbs().maxCoeff(), 1.0 / 3.0);
  EXPECT_EQ(net.weights()[0].b, Eigen::VectorXd::Zero(9));
  EXPECT_EQ(net.parameter_count(), 16u * 9u + 9u + 9u * 4u + 4u);
}

TEST(Mlp, BackpropMatchesCentralDifferences) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(100 + seed);
    for (auto act : {OutputActivation::kLinear, OutputActivation::kTanh}) {
      Mlp net({4, 6, 5, 2}, act, rng);
      jitter_biases(net, rng);
      const Eigen::MatrixXd x = uniform(rng, 4, 3);
      const Eigen::MatrixXd c = uniform(rng, 2, 3);
      Mlp::Cache cache;
      net.forward(x, cache);
      const auto g = net.backward(cache, c);
      const double h = 1e-5;
      for (std::size_t l = 0; l < net.weights().size(); ++l)
        for (Eigen::Index i = 0; i < net.weights()[l].w.size(); ++i) {
          double& p = net.weights()[l].w.data()[i];
          const double keep = p;
          p = keep + h;
          const double up = net.forward(x).cwiseProduct(c).sum();
          p = keep - h;
          const double dn = net.forward(x).cwiseProduct(c).sum();
          p = keep;
          const double num = (up - dn) / (2 * h);
          const double ana = g.params[l].w.data()[i];
          EXPECT_LE(std::abs(ana - num) / std::max({std::abs(ana), std::abs(num), 1e-6}), 1e-5);
        }
    }
  }
}

TEST(Mlp, SetWeightsChecksShapes) {
  Mlp net({2, 3, 1}, OutputActivation::kLinear);
  auto w = net.weights();
  w[0].w.resize(4, 2);
  EXPECT_THROW(net.set_weights(w), ContractViolation);
  EXPECT_THROW(net.forward(col(3, 0.0)), ContractViolation);
}

TEST(Mlp, SoftUpdateLimits) {
  Rng rng(2);
  const Mlp online({2, 4, 1}, OutputActivation::kLinear, rng);
  Mlp target({2, 4, 1}, OutputActivation::kLinear, rng);
  const WeightSet before = target.weights();
  soft_update(target, online, 0.0);
  EXPECT_EQ(target.weights(), before);
  soft_update(target, online, 1.0);
  EXPECT_EQ(target.weights(), online.weights());
}

TEST(Mlp, VstackSkipsEmptyParts) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Ones(2, 3);
  Eigen::MatrixXd empty;
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(1, 3);
  const Eigen::MatrixXd s = vstack({&a, &empty, &b});
  EXPECT_EQ(s.rows(), 3);
  EXPECT_EQ(s.row(2), Eigen::RowVectorXd::Zero(3));
}

TEST(Mlp, RegressionLossIsHalfMeanSquare) {
  Mlp net({1, 1}, OutputActivation::kLinear);
  auto w = net.weights();
  w[0].b(0) = 1.0;
  net.set_weights(w);
  double loss = 0.0;
  const auto g = regression_gradient(net, Eigen::MatrixXd::Zero(1, 2), Eigen::Vector2d(0.0, 3.0), &loss);
  EXPECT_DOUBLE_EQ(loss, 0.5 * (1.0 + 4.0) / 2.0);
  EXPECT_DOUBLE_EQ(g[0].b(0), (1.0 - 2.0) / 2.0);
}

TEST(Optimizer, SgdStepIsPlainDescent) {
  Mlp net({1, 1}, OutputActivation::kLinear);
  Optimizer opt(net, {OptimizerKind::kSgd, 0.1, 0.9, 0.999, 1e-8, 0.0});
  WeightSet g = zeros_like(net.weights());
  g[0].w(0, 0) = 2.0;
  g[0].b(0) = -1.0;
  opt.step(net, g);
  EXPECT_DOUBLE_EQ(net.weights()[0].w(0, 0), -0.2);
  EXPECT_DOUBLE_EQ(net.weights()[0].b(0), 0.1);
}

TEST(Optimizer, AdamFirstStepHasLearningRateMagnitude) {
  Mlp net({1, 1}, OutputActivation::kLinear);
  Optimizer opt(net, {});
  WeightSet g = zeros_like(net.weights());
  g[0].w(0, 0) = 5.0;
  g[0].b(0) = -0.01;
  opt.step(net, g);
  EXPECT_NEAR(net.weights()[0].w(0, 0), -1e-3, 1e-9);
  EXPECT_NEAR(net.weights()[0].b(0), 1e-3, 1e-6);
  EXPECT_EQ(opt.steps(), 1);
}

TEST(Optimizer, GlobalNormClipping) {
  Mlp net({1, 1}, OutputActivation::kLinear);
  Optimizer opt(net, {OptimizerKind::kSgd, 1.0, 0.9, 0.999, 1e-8, 1.0});
  WeightSet g = zeros_like(net.weights());
  g[0].w(0, 0) = 3.0;
  g[0].b(0) = 4.0;
  EXPECT_DOUBLE_EQ(global_norm(g), 5.0);
  opt.step(net, g);
  EXPECT_NEAR(net.weights()[0].w(0, 0), -0.6, 1e-15);
  EXPECT_NEAR(net.weights()[0].b(0), -0.8, 1e-15);
}

TEST(Optimizer, ShapeMismatchIsRejected) {
  Mlp net({1, 1}, OutputActivation::kLinear);
  Optimizer opt(net, {});
  EXPECT_THROW(opt.step(net, zeros_like(Mlp({2, 1}, OutputActivation::kLinear).weights())), ContractViolation);
}

}  // namespace
}  // namespace risiort::learn
