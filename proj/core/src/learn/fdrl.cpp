#include "risiort/learn/fdrl.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "risiort/error.hpp"
#include "risiort/learn/fedavg.hpp"
#include "risiort/learn/replay.hpp"

namespace risiort::learn {

namespace {

Eigen::VectorXd to_vec(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

struct Roll {
  std::vector<case1::LocalAction> local;
  std::vector<int> local_index;
  case1::GlobalAction global;
  int global_index = 0;
};

void aggregate(std::vector<DqnAgent>& locals) {
  std::vector<Mlp*> online;
  std::vector<Mlp*> target;
  for (auto& a : locals) {
    online.push_back(&a.online);
    target.push_back(&a.target);
  }
  fed_avg_in_place(online);
  fed_avg_in_place(target);
}

}  // namespace

FdrlResult fdrl_train(const Case1EnvFactory& factory, const TrainSchedule& sched,
                      const FdrlHooks& hooks) {
  validate_schedule(sched);
  case1::TrajectoryEnv env = factory(derive_seed(sched.seed, 0));
  const auto& cfg = env.config();
  const std::size_t k = cfg.robot_count();
  const case1::GlobalActionSpace space(static_cast<std::size_t>(cfg.topology.ris.elements),
                                       cfg.ris_bits, k);
  const int local_actions = static_cast<int>(case1::local_action_count(cfg));
  const int global_dim = static_cast<int>(env.global_state_dim());
  const int local_dim = static_cast<int>(case1::TrajectoryEnv::local_state_dim());

  Rng rng(derive_seed(sched.seed, 1));
  FdrlResult res;
  res.agents.global = make_dqn(rng, global_dim, static_cast<int>(space.size()), sched);
  // Locals start from one shared initialization, as distributed by the BS.
  const DqnAgent local_init = make_dqn(rng, local_dim, local_actions, sched);
  res.agents.locals.assign(k, local_init);

  const auto capacity = static_cast<std::size_t>(sched.replay_capacity);
  ReplayBuffer global_buf(capacity, global_dim, 1);
  std::vector<ReplayBuffer> local_bufs(k, ReplayBuffer(capacity, local_dim, 1));
  const auto batch = static_cast<std::size_t>(sched.batch_size);

  long step = 0;
  std::uniform_int_distribution<int> pick_local(0, local_actions - 1);
  std::uniform_int_distribution<std::size_t> pick_global(0, space.size() - 1);

  for (int ep = 0; ep < sched.episodes; ++ep) {
    case1::Observation obs = env.reset();
    double rate_sum = 0.0;
    int steps = 0;
    while (!env.done() && steps < sched.steps_per_episode) {
      const bool warm = step < sched.warmup_steps;
      const double eps = epsilon_at(sched, step);
      Roll roll;
      const Eigen::VectorXd gs = to_vec(obs.global);
      roll.global_index = warm ? static_cast<int>(pick_global(rng))
                               : epsilon_greedy(rng, res.agents.global, gs, eps);
      roll.global = space.decode(static_cast<std::size_t>(roll.global_index));
      std::vector<bool> active(k);
      for (std::size_t i = 0; i < k; ++i) {
        active[i] = !env.robots()[i].arrived;
        const int idx = warm ? pick_local(rng)
                             : epsilon_greedy(rng, res.agents.locals[i], to_vec(obs.local[i]), eps);
        roll.local_index.push_back(idx);
        roll.local.push_back(case1::decode_local_action(cfg, static_cast<std::size_t>(idx)));
      }

      const case1::StepResult sr = env.step(roll.global, roll.local);
      rate_sum += std::accumulate(sr.rates.begin(), sr.rates.end(), 0.0);
      ++steps;
      ++step;

      global_buf.push({gs, Eigen::VectorXd::Constant(1, roll.global_index),
                       std::max(sr.global_reward, sched.reward_floor),
                       to_vec(sr.observation.global), sr.done && env.arrival_fraction() == 1.0});
      for (std::size_t i = 0; i < k; ++i) {
        if (!active[i]) continue;
        // Deadline expiry is a truncation; only arrival is terminal.
        local_bufs[i].push({to_vec(obs.local[i]), Eigen::VectorXd::Constant(1, roll.local_index[i]),
                            std::max(sr.local_rewards[i], sched.reward_floor),
                            to_vec(sr.observation.local[i]), static_cast<bool>(sr.arrived_now[i])});
      }
      obs = sr.observation;

      if (!warm && step % sched.update_every == 0) {
        if (global_buf.size() >= batch)
          dqn_update(res.agents.global, global_buf.sample(rng, batch), sched);
        for (std::size_t i = 0; i < k; ++i)
          if (local_bufs[i].size() >= batch)
            dqn_update(res.agents.locals[i], local_bufs[i].sample(rng, batch), sched);
      }
      if (sched.aggregation_interval && step % *sched.aggregation_interval == 0) {
        aggregate(res.agents.locals);
        ++res.metrics.aggregations;
        if (hooks.on_aggregate) hooks.on_aggregate(step, res.agents.locals);
      }
    }
    res.metrics.energy_efficiency.push_back(env.episode_energy_efficiency());
    res.metrics.sum_rate.push_back(steps > 0 ? rate_sum / steps : 0.0);
    res.metrics.arrival_rate.push_back(env.arrival_fraction());
  }
  return res;
}

FdrlEvaluation fdrl_evaluate(const FdrlAgents& agents, const Case1EnvFactory& factory,
                             int episodes, std::uint64_t seed) {
  require(episodes > 0, "fdrl_evaluate: episodes must be > 0");
  FdrlEvaluation out;
  for (int ep = 0; ep < episodes; ++ep) {
    case1::TrajectoryEnv env = factory(derive_seed(seed, static_cast<std::uint64_t>(ep)));
    const auto& cfg = env.config();
    require(agents.locals.size() == cfg.robot_count(), "fdrl_evaluate: one local agent per robot");
    const case1::GlobalActionSpace space(static_cast<std::size_t>(cfg.topology.ris.elements),
                                         cfg.ris_bits, cfg.robot_count());
    case1::Observation obs = env.reset();
    double rate_sum = 0.0;
    int steps = 0;
    while (!env.done()) {
      const auto g = space.decode(static_cast<std::size_t>(greedy_action(agents.global.online, to_vec(obs.global))));
      std::vector<case1::LocalAction> local;
      for (std::size_t i = 0; i < agents.locals.size(); ++i)
        local.push_back(case1::decode_local_action(
            cfg, static_cast<std::size_t>(greedy_action(agents.locals[i].online, to_vec(obs.local[i])))));
      const auto sr = env.step(g, local);
      rate_sum += std::accumulate(sr.rates.begin(), sr.rates.end(), 0.0);
      ++steps;
      obs = sr.observation;
    }
    out.arrival_rate += env.arrival_fraction();
    out.energy_efficiency += env.episode_energy_efficiency();
    out.sum_rate += steps > 0 ? rate_sum / steps : 0.0;
  }
  out.arrival_rate /= episodes;
  out.energy_efficiency /= episodes;
  out.sum_rate /= episodes;
  return out;
}

}  // namespace risiort::learn
