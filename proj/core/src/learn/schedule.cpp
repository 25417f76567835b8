#include "risiort/learn/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "risiort/error.hpp"
#include "risiort/hash.hpp"

namespace risiort::learn {

namespace {

void positive(bool ok, const char* field) {
  if (!ok) throw ConfigError(std::string("schedule.") + field + " must be positive");
}

}  // namespace

void validate_schedule(const TrainSchedule& s) {
  positive(s.episodes > 0, "episodes");
  positive(s.steps_per_episode > 0, "steps_per_episode");
  positive(s.batch_size > 0, "batch_size");
  if (!(s.gamma > 0.0 && s.gamma <= 1.0))
    throw ConfigError("schedule.gamma must lie in (0, 1]");
  positive(s.actor_lr > 0.0, "actor_lr");
  positive(s.critic_lr > 0.0, "critic_lr");
  if (!(s.tau > 0.0 && s.tau <= 1.0)) throw ConfigError("schedule.tau must lie in (0, 1]");
  if (!(s.entropy_coef >= 0.0)) throw ConfigError("schedule.entropy_coef must be >= 0");
  if (s.aggregation_interval) positive(*s.aggregation_interval > 0, "aggregation_interval");
  if (s.hidden.empty()) throw ConfigError("schedule.hidden must list at least one layer");
  for (int h : s.hidden) positive(h > 0, "hidden");
  positive(s.replay_capacity > 0, "replay_capacity");
  if (s.warmup_steps < 0) throw ConfigError("schedule.warmup_steps must be >= 0");
  positive(s.update_every > 0, "update_every");
  if (!(s.epsilon_start >= 0.0 && s.epsilon_start <= 1.0 && s.epsilon_end >= 0.0 &&
        s.epsilon_end <= 1.0))
    throw ConfigError("schedule.epsilon_start/epsilon_end must lie in [0, 1]");
  positive(s.epsilon_decay_steps > 0, "epsilon_decay_steps");
  positive(s.target_sync_interval > 0, "target_sync_interval");
  if (!(s.exploration_noise >= 0.0)) throw ConfigError("schedule.exploration_noise must be >= 0");
  if (!(s.max_grad_norm >= 0.0)) throw ConfigError("schedule.max_grad_norm must be >= 0");
  if (!std::isfinite(s.reward_floor)) throw ConfigError("schedule.reward_floor must be finite");
}

std::string canonical_text(const TrainSchedule& s) {
  std::ostringstream o;
  o.precision(17);
  o << "episodes=" << s.episodes << '\n'
    << "steps_per_episode=" << s.steps_per_episode << '\n'
    << "batch_size=" << s.batch_size << '\n'
    << "gamma=" << s.gamma << '\n'
    << "actor_lr=" << s.actor_lr << '\n'
    << "critic_lr=" << s.critic_lr << '\n'
    << "tau=" << s.tau << '\n'
    << "entropy_coef=" << s.entropy_coef << '\n'
    << "aggregation_interval=" << (s.aggregation_interval ? std::to_string(*s.aggregation_interval) : "never") << '\n'
    << "seed=" << s.seed << '\n'
    << "hidden=";
  for (std::size_t i = 0; i < s.hidden.size(); ++i) o << (i ? "," : "") << s.hidden[i];
  o << '\n'
    << "replay_capacity=" << s.replay_capacity << '\n'
    << "warmup_steps=" << s.warmup_steps << '\n'
    << "update_every=" << s.update_every << '\n'
    << "epsilon_start=" << s.epsilon_start << '\n'
    << "epsilon_end=" << s.epsilon_end << '\n'
    << "epsilon_decay_steps=" << s.epsilon_decay_steps << '\n'
    << "target_sync_interval=" << s.target_sync_interval << '\n'
    << "exploration_noise=" << s.exploration_noise << '\n'
    << "max_grad_norm=" << s.max_grad_norm << '\n'
    << "reward_floor=" << s.reward_floor << '\n';
  return o.str();
}

std::uint64_t schedule_hash(const TrainSchedule& s) { return fnv1a64(canonical_text(s)); }

double epsilon_at(const TrainSchedule& s, long step) {
  const double frac = std::clamp(static_cast<double>(step) / s.epsilon_decay_steps, 0.0, 1.0);
  return s.epsilon_start + (s.epsilon_end - s.epsilon_start) * frac;
}

OptimizerParams actor_optimizer(const TrainSchedule& s) {
  OptimizerParams p;
  p.lr = s.actor_lr;
  p.max_grad_norm = s.max_grad_norm;
  return p;
}

OptimizerParams critic_optimizer(const TrainSchedule& s) {
  OptimizerParams p;
  p.lr = s.critic_lr;
  p.max_grad_norm = s.max_grad_norm;
  return p;
}

}  // namespace risiort::learn
