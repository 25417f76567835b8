#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "risiort/error.hpp"
#include "risiort/learn/checkpoint.hpp"
#include "risiort/learn/fdrl.hpp"
#include "risiort/learn/fedavg.hpp"
#include "risiort/learn/schedule.hpp"

namespace risiort::learn {
namespace {

WeightSet random_set(std::uint64_t seed) {
  Rng rng(seed);
  Mlp net({3, 4, 2}, OutputActivation::kLinear, rng);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (auto& l : net.weights())
    for (Eigen::Index i = 0; i < l.b.size(); ++i) l.b(i) = u(rng);
  return net.weights();
}

TEST(FedAvg, IdenticalInputsAreReturnedUnchanged) {
  const WeightSet w = random_set(1);
  EXPECT_EQ(fed_avg({w, w, w}), w);
}

TEST(FedAvg, TwoSetMeanIsElementwise) {
  const WeightSet a = random_set(2);
  const WeightSet b = random_set(3);
  const WeightSet m = fed_avg({a, b});
  for (std::size_t l = 0; l < m.size(); ++l) {
    EXPECT_TRUE(m[l].w.isApprox(0.5 * (a[l].w + b[l].w), 1e-15));
    EXPECT_TRUE(m[l].b.isApprox(0.5 * (a[l].b + b[l].b), 1e-15));
  }
}

TEST(FedAvg, EveryPermutationGivesIdenticalBits) {
  std::vector<WeightSet> sets{random_set(4), random_set(5), random_set(6), random_set(7)};
  const WeightSet ref = fed_avg(sets);
  std::vector<int> order{0, 1, 2, 3};
  while (std::next_permutation(order.begin(), order.end())) {
    std::vector<WeightSet> p;
    for (int i : order) p.push_back(sets[i]);
    EXPECT_EQ(fed_avg(p), ref);
  }
}

TEST(FedAvg, ShapeMismatchAndEmptyInputThrow) {
  Rng rng(1);
  const WeightSet other = Mlp({3, 5, 2}, OutputActivation::kLinear, rng).weights();
  EXPECT_THROW(fed_avg({random_set(1), other}), ContractViolation);
  EXPECT_THROW(fed_avg({}), ContractViolation);
}

TEST(FedAvg, InPlaceLeavesAllNetsEqual) {
  Rng rng(8);
  Mlp a({2, 3, 1}, OutputActivation::kLinear, rng);
  Mlp b({2, 3, 1}, OutputActivation::kLinear, rng);
  fed_avg_in_place({&a, &b});
  EXPECT_EQ(a.weights(), b.weights());
}

Checkpoint sample_checkpoint() {
  Rng rng(9);
  Checkpoint c;
  c.schedule_hash = 0x0123456789abcdefULL;
  Mlp tanh_net({2, 5, 3}, OutputActivation::kTanh, rng);
  tanh_net.weights()[0].b(1) = 1.0 / 3.0;
  c.nets.push_back({"actor", tanh_net});
  c.nets.push_back({"critic", Mlp({4, 1}, OutputActivation::kLinear, rng)});
  return c;
}

TEST(Checkpoint, RoundTripIsBitExact) {
  const Checkpoint c = sample_checkpoint();
  std::stringstream io;
  write_checkpoint(io, c);
  const Checkpoint back = read_checkpoint(io);
  EXPECT_EQ(back.schedule_hash, c.schedule_hash);
  ASSERT_EQ(back.nets.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(back.nets[i].name, c.nets[i].name);
    EXPECT_EQ(back.nets[i].net.layer_sizes(), c.nets[i].net.layer_sizes());
    EXPECT_EQ(back.nets[i].net.output_activation(), c.nets[i].net.output_activation());
    EXPECT_EQ(back.nets[i].net.weights(), c.nets[i].net.weights());
  }
}

std::string expect_config_error(const std::string& text) {
  std::istringstream in(text);
  try {
    read_checkpoint(in);
  } catch (const ConfigError& e) {
    return e.what();
  }
  ADD_FAILURE() << "no ConfigError for malformed checkpoint";
  return {};
}

TEST(Checkpoint, MalformedInputNamesTheLine) {
  std::stringstream io;
  write_checkpoint(io, sample_checkpoint());
  const std::string good = io.str();
  EXPECT_NE(expect_config_error("garbage\n").find("line 1"), std::string::npos);

  std::string bad_value = good;
  const auto pos = bad_value.find("\nb ");
  bad_value.replace(pos + 3, 1, "z");
  const int bad_line = int(std::count(good.begin(), good.begin() + long(pos) + 1, '\n')) + 1;
  EXPECT_NE(expect_config_error(bad_value).find("line " + std::to_string(bad_line)), std::string::npos);

  EXPECT_FALSE(expect_config_error(good.substr(0, good.size() / 2)).empty());
}

TEST(Schedule, ValidationNamesTheField) {
  TrainSchedule s;
  EXPECT_NO_THROW(validate_schedule(s));
  s.gamma = 1.5;
  try {
    validate_schedule(s);
    ADD_FAILURE();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("gamma"), std::string::npos);
  }
  s = {};
  s.aggregation_interval = 0;
  EXPECT_THROW(validate_schedule(s), ConfigError);
  s = {};
  s.hidden.clear();
  EXPECT_THROW(validate_schedule(s), ConfigError);
}

TEST(Schedule, HashTracksEveryField) {
  const TrainSchedule a;
  TrainSchedule b;
  EXPECT_EQ(schedule_hash(a), schedule_hash(b));
  b.tau = 0.0050000000000000001;  // same double
  EXPECT_EQ(schedule_hash(a), schedule_hash(b));
  b.tau = 0.006;
  EXPECT_NE(schedule_hash(a), schedule_hash(b));
  b = {};
  b.aggregation_interval = 100;
  EXPECT_NE(schedule_hash(a), schedule_hash(b));
  b = {};
  b.hidden = {128, 33};
  EXPECT_NE(canonical_text(a), canonical_text(b));
}

TEST(Schedule, EpsilonDecaysLinearlyThenHolds) {
  TrainSchedule s;
  s.epsilon_start = 1.0;
  s.epsilon_end = 0.1;
  s.epsilon_decay_steps = 100;
  EXPECT_DOUBLE_EQ(epsilon_at(s, 0), 1.0);
  EXPECT_NEAR(epsilon_at(s, 50), 0.55, 1e-15);
  EXPECT_DOUBLE_EQ(epsilon_at(s, 100), 0.1);
  EXPECT_DOUBLE_EQ(epsilon_at(s, 10000), 0.1);
}

case1::Case1Config small_map() {
  case1::Case1Config c;
  c.topology.bs_list = {{{2.5, -3.0, 5.0}, 2}};
  c.topology.ris = {{2.5, 7.0, 3.0}, 2};
  c.topology.devices = {{0.5, 0.5, 0.0}, {1.5, 0.5, 0.0}};
  c.topology.obstacles = {{{0.0, 2.4, 0.0}, {4.0, 2.6, 3.0}}};
  c.destinations = {{0.5, 4.5, 0.0}, {1.5, 4.5, 0.0}};
  c.area = case1::Area{{0.0, 0.0, 0.0}, {5.0, 5.0, 0.0}};
  c.ris_bits = 1;
  c.deadline = 20;
  return c;
}

TrainSchedule short_schedule() {
  TrainSchedule s;
  s.episodes = 4;
  s.steps_per_episode = 20;
  s.batch_size = 8;
  s.hidden = {8};
  s.warmup_steps = 10;
  s.replay_capacity = 200;
  s.epsilon_decay_steps = 50;
  s.aggregation_interval = 15;
  return s;
}

TEST(Fdrl, LocalsAreBitIdenticalAfterEveryAggregation) {
  const Case1EnvFactory f = [](std::uint64_t seed) { return case1::TrajectoryEnv(small_map(), seed); };
  int calls = 0;
  FdrlHooks hooks;
  hooks.on_aggregate = [&](long step, const std::vector<DqnAgent>& locals) {
    ++calls;
    EXPECT_EQ(step % 15, 0);
    for (const auto& l : locals) EXPECT_EQ(l.online.weights(), locals.front().online.weights());
  };
  const FdrlResult r = fdrl_train(f, short_schedule(), hooks);
  EXPECT_GE(calls, 1);
  EXPECT_EQ(r.metrics.aggregations, std::size_t(calls));
  EXPECT_EQ(r.metrics.arrival_rate.size(), 4u);
}

TEST(Fdrl, WithoutAggregationLocalsDiverge) {
  const Case1EnvFactory f = [](std::uint64_t seed) { return case1::TrajectoryEnv(small_map(), seed); };
  TrainSchedule s = short_schedule();
  s.aggregation_interval.reset();
  const FdrlResult r = fdrl_train(f, s);
  EXPECT_EQ(r.metrics.aggregations, 0u);
  EXPECT_FALSE(r.agents.locals[0].online.weights() == r.agents.locals[1].online.weights());
}

TEST(Fdrl, TrainingAndEvaluationAreDeterministic) {
  const Case1EnvFactory f = [](std::uint64_t seed) { return case1::TrajectoryEnv(small_map(), seed); };
  const FdrlResult a = fdrl_train(f, short_schedule());
  const FdrlResult b = fdrl_train(f, short_schedule());
  EXPECT_EQ(a.metrics.energy_efficiency, b.metrics.energy_efficiency);
  EXPECT_EQ(a.agents.global.online.weights(), b.agents.global.online.weights());
  const FdrlEvaluation ea = fdrl_evaluate(a.agents, f, 3, 5);
  const FdrlEvaluation eb = fdrl_evaluate(b.agents, f, 3, 5);
  EXPECT_EQ(ea.energy_efficiency, eb.energy_efficiency);
  EXPECT_GE(ea.arrival_rate, 0.0);
  EXPECT_LE(ea.arrival_rate, 1.0);
}

}  // namespace
}  // namespace risiort::learn
