#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "risiort/learn/optim.hpp"

namespace risiort::learn {

struct TrainSchedule {
  int episodes = 200;
  int steps_per_episode = 200;
  int batch_size = 64;
  double gamma = 0.99;
  double actor_lr = 3e-4;
  double critic_lr = 1e-3;
  double tau = 0.005;               // target smoothing
  double entropy_coef = 0.05;       // SAC, fixed
  std::optional<int> aggregation_interval;  // FDRL, env steps; empty = never
  std::uint64_t seed = 1;

  std::vector<int> hidden{128, 32};
  int replay_capacity = 100000;
  int warmup_steps = 500;           // uniform-random actions, no updates
  int update_every = 1;             // env steps per gradient update
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  int epsilon_decay_steps = 10000;
  int target_sync_interval = 200;   // DQN hard sync, in updates
  double exploration_noise = 0.1;   // DDPG Gaussian std in the action box
  double max_grad_norm = 10.0;      // 0 disables clipping
  double reward_floor = -100.0;     // rewards are clipped from below before storage
};

// Throws ConfigError naming the offending field.
void validate_schedule(const TrainSchedule& s);

// Canonical "key=value" lines, fixed order, round-trip precision.
std::string canonical_text(const TrainSchedule& s);
std::uint64_t schedule_hash(const TrainSchedule& s);

// Linear decay from epsilon_start to epsilon_end over epsilon_decay_steps.
double epsilon_at(const TrainSchedule& s, long step);

OptimizerParams actor_optimizer(const TrainSchedule& s);
OptimizerParams critic_optimizer(const TrainSchedule& s);

}  // namespace risiort::learn
