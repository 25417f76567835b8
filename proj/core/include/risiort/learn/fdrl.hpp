#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "risiort/case1.hpp"
#include "risiort/learn/dqn.hpp"
#include "risiort/learn/schedule.hpp"

// Two-stage federated training for the trajectory environment: a global DQN
// picks RIS phases and the decoding order, per-robot local DQNs pick heading
// and power, and the local nets are periodically replaced by their mean.
namespace risiort::learn {

using Case1EnvFactory = std::function<case1::TrajectoryEnv(std::uint64_t seed)>;

struct FdrlAgents {
  DqnAgent global;
  std::vector<DqnAgent> locals;
};

struct FdrlMetrics {
  std::vector<double> energy_efficiency;  // bits/J per episode
  std::vector<double> sum_rate;           // bits/s/Hz, mean over the episode's steps
  std::vector<double> arrival_rate;       // fraction of robots arrived at episode end
  std::size_t aggregations = 0;
};

struct FdrlResult {
  FdrlAgents agents;
  FdrlMetrics metrics;
};

struct FdrlHooks {
  // Called right after every aggregation with the global env step count.
  std::function<void(long step, const std::vector<DqnAgent>& locals)> on_aggregate;
};

FdrlResult fdrl_train(const Case1EnvFactory& factory, const TrainSchedule& sched,
                      const FdrlHooks& hooks = {});

struct FdrlEvaluation {
  double arrival_rate = 0.0;       // mean over episodes
  double energy_efficiency = 0.0;  // mean over episodes
  double sum_rate = 0.0;
};

// Greedy roll-outs on envs built from derive_seed(seed, episode).
FdrlEvaluation fdrl_evaluate(const FdrlAgents& agents, const Case1EnvFactory& factory,
                             int episodes, std::uint64_t seed);

}  // namespace risiort::learn
