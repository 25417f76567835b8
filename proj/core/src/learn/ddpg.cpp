#include "risiort/learn/ddpg.hpp"

#include <algorithm>
#include <random>

#include "risiort/error.hpp"

namespace risiort::learn {

namespace {

std::vector<int> net_sizes(int in, const std::vector<int>& hidden, int out) {
  std::vector<int> sizes{in};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(out);
  return sizes;
}

}  // namespace

DdpgAgent make_ddpg(Rng& rng, int actor_in_dim, int critic_ctx_dim, int action_dim,
                    const std::vector<int>& hidden, const OptimizerParams& actor_opt,
                    const OptimizerParams& critic_opt) {
  DdpgAgent a;
  a.actor = Mlp(net_sizes(actor_in_dim, hidden, action_dim), OutputActivation::kTanh, rng);
  a.critic = Mlp(net_sizes(critic_ctx_dim + action_dim, hidden, 1), OutputActivation::kLinear, rng);
  a.actor_target = a.actor;
  a.critic_target = a.critic;
  a.actor_opt = Optimizer(a.actor, actor_opt);
  a.critic_opt = Optimizer(a.critic, critic_opt);
  return a;
}

DdpgAgent make_ddpg(Rng& rng, int actor_in_dim, int critic_ctx_dim, int action_dim,
                    const TrainSchedule& s) {
  return make_ddpg(rng, actor_in_dim, critic_ctx_dim, action_dim, s.hidden, actor_optimizer(s),
                   critic_optimizer(s));
}

Eigen::VectorXd ddpg_act(const DdpgAgent& agent, const Eigen::VectorXd& actor_in) {
  return agent.actor.forward(actor_in);
}

Eigen::VectorXd ddpg_explore(Rng& rng, const DdpgAgent& agent, const Eigen::VectorXd& actor_in,
                             double noise_std) {
  Eigen::VectorXd a = ddpg_act(agent, actor_in);
  std::normal_distribution<double> n(0.0, 1.0);
  for (Eigen::Index i = 0; i < a.size(); ++i)
    a(i) = std::clamp(a(i) + noise_std * n(rng), -1.0, 1.0);
  return a;
}

Eigen::VectorXd ddpg_targets(const DdpgAgent& agent, const ConditionedBatch& batch, double gamma) {
  const Eigen::MatrixXd next_a = agent.actor_target.forward(batch.next_actor_in);
  const Eigen::MatrixXd next_q =
      agent.critic_target.forward(vstack({&batch.next_critic_ctx, &next_a}));
  Eigen::VectorXd y = batch.rewards;
  for (Eigen::Index j = 0; j < y.size(); ++j)
    if (batch.done(j) == 0.0) y(j) += gamma * next_q(0, j);
  return y;
}

WeightSet ddpg_actor_gradient(const DdpgAgent& agent, const Eigen::MatrixXd& actor_in,
                              const Eigen::MatrixXd& critic_ctx, double* loss) {
  const auto n = actor_in.cols();
  Mlp::Cache actor_cache;
  const Eigen::MatrixXd a = agent.actor.forward(actor_in, actor_cache);
  Mlp::Cache critic_cache;
  const Eigen::MatrixXd q = agent.critic.forward(vstack({&critic_ctx, &a}), critic_cache);
  if (loss) *loss = -q.mean();
  const Eigen::MatrixXd up = Eigen::MatrixXd::Constant(1, n, -1.0 / static_cast<double>(n));
  const auto cg = agent.critic.backward(critic_cache, up);
  const Eigen::MatrixXd da = cg.dx.bottomRows(a.rows());
  return agent.actor.backward(actor_cache, da).params;
}

DdpgLosses ddpg_update(DdpgAgent& agent, const ConditionedBatch& batch, double gamma, double tau) {
  require(batch.size() > 0, "ddpg_update: empty batch");
  require(batch.actions.rows() == agent.action_dim(), "ddpg_update: action dimension mismatch");
  DdpgLosses out;

  const Eigen::VectorXd y = ddpg_targets(agent, batch, gamma);
  auto cg = regression_gradient(agent.critic, vstack({&batch.critic_ctx, &batch.actions}), y, &out.critic);
  agent.critic_opt.step(agent.critic, std::move(cg));

  auto ag = ddpg_actor_gradient(agent, batch.actor_in, batch.actor_ctx(), &out.actor);
  agent.actor_opt.step(agent.actor, std::move(ag));

  soft_update(agent.critic_target, agent.critic, tau);
  soft_update(agent.actor_target, agent.actor, tau);
  return out;
}

DdpgLosses ddpg_update(DdpgAgent& agent, const ConditionedBatch& batch, const TrainSchedule& s) {
  return ddpg_update(agent, batch, s.gamma, s.tau);
}

}  // namespace risiort::learn
