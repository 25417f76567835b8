#include "risiort/learn/dqn.hpp"

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

DqnAgent make_dqn(Rng& rng, int state_dim, int actions, const std::vector<int>& hidden,
                  const OptimizerParams& opt, int sync_interval) {
  require(actions >= 1, "make_dqn: at least one action required");
  require(sync_interval >= 1, "make_dqn: sync interval must be >= 1");
  DqnAgent a;
  a.online = Mlp(net_sizes(state_dim, hidden, actions), OutputActivation::kLinear, rng);
  a.target = a.online;
  a.optimizer = Optimizer(a.online, opt);
  a.sync_interval = sync_interval;
  return a;
}

DqnAgent make_dqn(Rng& rng, int state_dim, int actions, const TrainSchedule& s) {
  return make_dqn(rng, state_dim, actions, s.hidden, critic_optimizer(s), s.target_sync_interval);
}

int greedy_action(const Mlp& q, const Eigen::VectorXd& state) {
  const Eigen::VectorXd values = q.forward(state);
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < values.size(); ++i)
    if (values(i) > values(best)) best = i;
  return static_cast<int>(best);
}

int epsilon_greedy(Rng& rng, const DqnAgent& agent, const Eigen::VectorXd& state, double epsilon) {
  if (uniform01(rng) < epsilon) {
    std::uniform_int_distribution<int> pick(0, agent.action_count() - 1);
    return pick(rng);
  }
  return greedy_action(agent.online, state);
}

Eigen::VectorXd dqn_targets(const DqnAgent& agent, const Batch& batch, double gamma) {
  const Eigen::MatrixXd next_q = agent.target.forward(batch.next_states);
  Eigen::VectorXd y = batch.rewards;
  if (gamma != 0.0)
    for (Eigen::Index j = 0; j < y.size(); ++j)
      if (batch.done(j) == 0.0) y(j) += gamma * next_q.col(j).maxCoeff();
  return y;
}

WeightSet dqn_loss_gradient(const DqnAgent& agent, const Batch& batch, const Eigen::VectorXd& targets,
                            double* loss) {
  require(batch.size() > 0, "dqn_update: empty batch");
  require(batch.actions.rows() >= 1, "dqn_update: batch carries no action indices");
  require(targets.size() == batch.size(), "dqn_update: one target per transition required");
  Mlp::Cache cache;
  const Eigen::MatrixXd q = agent.online.forward(batch.states, cache);
  const auto n = batch.size();
  Eigen::MatrixXd upstream = Eigen::MatrixXd::Zero(q.rows(), n);
  double total = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto a = static_cast<Eigen::Index>(batch.actions(0, j));
    require(a >= 0 && a < q.rows(), "dqn_update: action index out of range");
    const double diff = q(a, j) - targets(j);
    total += 0.5 * diff * diff;
    upstream(a, j) = diff / static_cast<double>(n);
  }
  if (loss) *loss = total / static_cast<double>(n);
  return agent.online.backward(cache, upstream).params;
}

double dqn_update(DqnAgent& agent, const Batch& batch, double gamma) {
  require(batch.size() > 0, "dqn_update: empty batch");
  double loss = 0.0;
  auto grads = dqn_loss_gradient(agent, batch, dqn_targets(agent, batch, gamma), &loss);
  agent.optimizer.step(agent.online, std::move(grads));
  ++agent.updates;
  if (agent.updates % agent.sync_interval == 0) agent.target = agent.online;
  return loss;
}

double dqn_update(DqnAgent& agent, const Batch& batch, const TrainSchedule& s) {
  return dqn_update(agent, batch, s.gamma);
}

}  // namespace risiort::learn
