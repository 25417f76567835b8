#include <benchmark/benchmark.h>

#include "risiort/aircomp.hpp"
#include "risiort/case1.hpp"
#include "risiort/learn/mlp.hpp"
#include "risiort/learn/sac.hpp"
#include "risiort/ris.hpp"

namespace {

using namespace risiort;

ChannelSet ris_channel(int elements) {
  Topology t;
  t.bs_list = {{{0.0, 0.0, 3.0}, 4}};
  t.ris = {{6.0, 8.0, 3.0}, elements};
  t.devices = {{4.0, 6.0, 0.0}};
  Rng rng(1);
  return sample_channel(rng, t, LinkParams{}, 0, 0);
}

void BM_BruteForce(benchmark::State& state) {
  const ChannelSet cs = ris_channel(static_cast<int>(state.range(0)));
  const RisObjective gain = [](const Eigen::VectorXcd& h) { return h.squaredNorm(); };
  for (auto _ : state) benchmark::DoNotOptimize(brute_force_best_config(cs, 2, gain).objective);
  state.SetItemsProcessed(state.iterations() * (1LL << (2 * state.range(0))));
}
BENCHMARK(BM_BruteForce)->Arg(4)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_MlpForwardBackward(benchmark::State& state) {
  Rng rng(2);
  const learn::Mlp net({65, 128, 32, 19}, learn::OutputActivation::kLinear, rng);
  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(65, state.range(0));
  const Eigen::MatrixXd up = Eigen::MatrixXd::Ones(19, state.range(0));
  learn::Mlp::Cache cache;
  for (auto _ : state) {
    net.forward(x, cache);
    benchmark::DoNotOptimize(net.backward(cache, up).params.front().w.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MlpForwardBackward)->Arg(1)->Arg(32)->Arg(128);

void BM_SacUpdate(benchmark::State& state) {
  Rng rng(3);
  const int s_dim = 65;
  const int a_dim = 19;
  const auto n = static_cast<Eigen::Index>(state.range(0));
  learn::SacAgent agent = learn::make_sac(rng, s_dim, s_dim, a_dim, learn::TrainSchedule{});
  learn::ConditionedBatch b;
  b.actor_in = Eigen::MatrixXd::Random(s_dim, n);
  b.critic_ctx = b.actor_in;
  b.next_actor_in = Eigen::MatrixXd::Random(s_dim, n);
  b.next_critic_ctx = b.next_actor_in;
  b.actions = Eigen::MatrixXd::Random(a_dim, n);
  b.rewards = Eigen::VectorXd::Random(n);
  b.done = Eigen::VectorXd::Zero(n);
  for (auto _ : state) benchmark::DoNotOptimize(learn::sac_update(rng, agent, b, 0.1, 0.005, 0.002).q1);
}
BENCHMARK(BM_SacUpdate)->Arg(32)->Arg(64)->Unit(benchmark::kMicrosecond);

void BM_AirCompStep(benchmark::State& state) {
  aircomp::Case3Config c;
  c.topology.bs_list = {{{0.0, 0.0, 2.0}, 4}};
  c.topology.ris = {{4.0, 4.0, 2.0}, 4};
  c.topology.devices = {{3.0, 5.0, 0.0}, {5.0, 5.0, 0.0}};
  c.episode_length = 1 << 30;
  aircomp::AirCompEnv env(c, 4);
  env.reset();
  Rng rng(5);
  aircomp::AgentActions act;
  act.agent1 = {random_config(rng, 4, 1), random_config(rng, 4, 1)};
  act.agent2.w_dl = complex_normal_vector(rng, 4).normalized();
  act.agent2.a = complex_normal_vector(rng, 4).normalized();
  act.agent2.b = complex_normal_vector(rng, 2, 1e-4);
  act.agent2.eta = 1e-9;
  for (auto _ : state) benchmark::DoNotOptimize(env.step(act).mse);
}
BENCHMARK(BM_AirCompStep);

void BM_TrajectoryStep(benchmark::State& state) {
  case1::Case1Config c;
  c.topology.bs_list = {{{2.5, -3.0, 5.0}, 2}};
  c.topology.ris = {{2.5, 7.0, 3.0}, 2};
  c.topology.devices = {{0.5, 0.5, 0.0}, {1.5, 0.5, 0.0}};
  c.destinations = {{0.5, 4.5, 0.0}, {1.5, 4.5, 0.0}};
  c.area = case1::Area{{0.0, 0.0, 0.0}, {5.0, 5.0, 0.0}};
  c.ris_bits = 1;
  c.deadline = 1 << 30;
  case1::TrajectoryEnv env(c, 6);
  env.reset();
  const case1::GlobalAction g{{0, 0}, {}};
  const std::vector<case1::LocalAction> stay{{case1::Heading::kStay, 1}, {case1::Heading::kStay, 1}};
  for (auto _ : state) benchmark::DoNotOptimize(env.step(g, stay).global_reward);
}
BENCHMARK(BM_TrajectoryStep);

}  // namespace

BENCHMARK_MAIN();
