#pragma once

#include <vector>

#include "risiort/learn/mlp.hpp"
#include "risiort/learn/optim.hpp"
#include "risiort/learn/replay.hpp"
#include "risiort/learn/schedule.hpp"

namespace risiort::learn {

struct DqnAgent {
  Mlp online;
  Mlp target;
  Optimizer optimizer;
  int sync_interval = 200;  // updates between hard target copies
  long updates = 0;

  int action_count() const { return online.output_dim(); }
  int state_dim() const { return online.input_dim(); }
};

DqnAgent make_dqn(Rng& rng, int state_dim, int actions, const std::vector<int>& hidden,
                  const OptimizerParams& opt, int sync_interval);
DqnAgent make_dqn(Rng& rng, int state_dim, int actions, const TrainSchedule& s);

// Lowest index among the maximizers.
int greedy_action(const Mlp& q, const Eigen::VectorXd& state);
int epsilon_greedy(Rng& rng, const DqnAgent& agent, const Eigen::VectorXd& state, double epsilon);

// One semi-gradient step on mean 0.5 (Q(s,a) - y)^2 with
// y = r + gamma (1 - done) max_a' Q_target(s', a'). Actions are stored as
// the index in row 0. Returns the loss before the step.
double dqn_update(DqnAgent& agent, const Batch& batch, double gamma);
double dqn_update(DqnAgent& agent, const Batch& batch, const TrainSchedule& s);

// Gradient of mean 0.5 (Q(s,a) - y)^2 for fixed targets y.
WeightSet dqn_loss_gradient(const DqnAgent& agent, const Batch& batch, const Eigen::VectorXd& targets,
                            double* loss = nullptr);

// TD targets used by dqn_update.
Eigen::VectorXd dqn_targets(const DqnAgent& agent, const Batch& batch, double gamma);

}  // namespace risiort::learn
