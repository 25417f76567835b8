#pragma once

#include <vector>

#include "risiort/learn/mlp.hpp"
#include "risiort/learn/optim.hpp"
#include "risiort/learn/replay.hpp"
#include "risiort/learn/schedule.hpp"

namespace risiort::learn {

// Squashed Gaussian actor (mean and raw log-std heads) with twin critics.
// log_std = lo + (hi - lo)(tanh(raw) + 1)/2 keeps the spread inside [lo, hi]
// smoothly.
struct SacAgent {
  Mlp actor;  // outputs [mean; raw log-std], 2 x action_dim
  Mlp q1;
  Mlp q2;
  Mlp q1_target;
  Mlp q2_target;
  Optimizer actor_opt;
  Optimizer q1_opt;
  Optimizer q2_opt;
  double log_std_min = -5.0;
  double log_std_max = 2.0;

  int action_dim() const { return actor.output_dim() / 2; }
};

SacAgent make_sac(Rng& rng, int actor_in_dim, int critic_ctx_dim, int action_dim,
                  const std::vector<int>& hidden, const OptimizerParams& actor_opt,
                  const OptimizerParams& critic_opt, double log_std_min = -5.0,
                  double log_std_max = 2.0);
SacAgent make_sac(Rng& rng, int actor_in_dim, int critic_ctx_dim, int action_dim,
                  const TrainSchedule& s);

struct PolicySample {
  Eigen::MatrixXd action;    // tanh(mean + std * noise), inside [-1, 1]
  Eigen::VectorXd log_prob;  // squashing-corrected
  Eigen::MatrixXd mean_action;  // tanh(mean)
};

// `noise` holds standard normal draws, action_dim x batch.
PolicySample sac_policy(const SacAgent& agent, const Eigen::MatrixXd& actor_in,
                        const Eigen::MatrixXd& noise);
Eigen::VectorXd sac_sample(Rng& rng, const SacAgent& agent, const Eigen::VectorXd& actor_in);
Eigen::VectorXd sac_act(const SacAgent& agent, const Eigen::VectorXd& actor_in);

// y = r + gamma (1 - done)(min_i Q_i'(ctx', a') - alpha log pi(a'|s')), a' ~ pi.
Eigen::VectorXd sac_targets(Rng& rng, const SacAgent& agent, const ConditionedBatch& batch,
                            double gamma, double alpha);

// Reparameterized actor loss mean(alpha log pi - min(Q1, Q2)) for fixed noise.
double sac_actor_loss(const SacAgent& agent, const Eigen::MatrixXd& actor_in,
                      const Eigen::MatrixXd& critic_ctx, const Eigen::MatrixXd& noise,
                      double alpha);
WeightSet sac_actor_gradient(const SacAgent& agent, const Eigen::MatrixXd& actor_in,
                             const Eigen::MatrixXd& critic_ctx, const Eigen::MatrixXd& noise,
                             double alpha, double* loss = nullptr);

struct SacLosses {
  double q1 = 0.0;
  double q2 = 0.0;
  double actor = 0.0;
};

// Twin critic steps, an actor step against the updated critics, then soft
// updates of both critic targets.
SacLosses sac_update(Rng& rng, SacAgent& agent, const ConditionedBatch& batch, double gamma,
                     double tau, double alpha);
SacLosses sac_update(Rng& rng, SacAgent& agent, const ConditionedBatch& batch,
                     const TrainSchedule& s);

}  // namespace risiort::learn
