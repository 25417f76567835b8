#pragma once

#include <vector>

#include "risiort/learn/mlp.hpp"
#include "risiort/learn/optim.hpp"
#include "risiort/learn/replay.hpp"
#include "risiort/learn/schedule.hpp"

namespace risiort::learn {

// Deterministic tanh actor, Q(context, action) critic, soft-updated targets.
struct DdpgAgent {
  Mlp actor;
  Mlp actor_target;
  Mlp critic;
  Mlp critic_target;
  Optimizer actor_opt;
  Optimizer critic_opt;

  int action_dim() const { return actor.output_dim(); }
};

DdpgAgent make_ddpg(Rng& rng, int actor_in_dim, int critic_ctx_dim, int action_dim,
                    const std::vector<int>& hidden, const OptimizerParams& actor_opt,
                    const OptimizerParams& critic_opt);
DdpgAgent make_ddpg(Rng& rng, int actor_in_dim, int critic_ctx_dim, int action_dim,
                    const TrainSchedule& s);

Eigen::VectorXd ddpg_act(const DdpgAgent& agent, const Eigen::VectorXd& actor_in);
// Gaussian exploration, clipped to the box.
Eigen::VectorXd ddpg_explore(Rng& rng, const DdpgAgent& agent, const Eigen::VectorXd& actor_in,
                             double noise_std);

Eigen::VectorXd ddpg_targets(const DdpgAgent& agent, const ConditionedBatch& batch, double gamma);

// Gradient of -mean Q(ctx, actor(in)) with respect to the actor weights.
WeightSet ddpg_actor_gradient(const DdpgAgent& agent, const Eigen::MatrixXd& actor_in,
                              const Eigen::MatrixXd& critic_ctx, double* loss = nullptr);

struct DdpgLosses {
  double critic = 0.0;
  double actor = 0.0;
};

// Critic TD step, then an actor step against the updated critic, then soft
// target updates.
DdpgLosses ddpg_update(DdpgAgent& agent, const ConditionedBatch& batch, double gamma, double tau);
DdpgLosses ddpg_update(DdpgAgent& agent, const ConditionedBatch& batch, const TrainSchedule& s);

}  // namespace risiort::learn
