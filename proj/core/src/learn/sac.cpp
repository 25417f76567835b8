#include "risiort/learn/sac.hpp"

#include <cmath>
#include <random>

#include "risiort/error.hpp"

namespace risiort::learn {

namespace {

constexpr double kSquashEps = 1e-6;
const double kHalfLog2Pi = 0.5 * std::log(2.0 * kPi);

std::vector<int> net_sizes(int in, const std::vector<int>& hidden, int out) {
  std::vector<int> sizes{in};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(out);
  return sizes;
}

Eigen::MatrixXd standard_normal(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = n(rng);
  return m;
}

struct PolicyTerms {
  Eigen::MatrixXd mean;
  Eigen::MatrixXd tanh_raw;  // tanh of the raw log-std head
  Eigen::MatrixXd log_std;
  Eigen::MatrixXd std;
  Eigen::MatrixXd action;
  Eigen::VectorXd log_prob;
};

PolicyTerms policy_terms(const SacAgent& agent, const Eigen::MatrixXd& head,
                         const Eigen::MatrixXd& noise) {
  const Eigen::Index d = agent.action_dim();
  require(noise.rows() == d && noise.cols() == head.cols(), "sac: noise dimension mismatch");
  const double half_span = 0.5 * (agent.log_std_max - agent.log_std_min);
  PolicyTerms p;
  p.mean = head.topRows(d);
  p.tanh_raw = head.bottomRows(d).array().tanh();
  p.log_std = (agent.log_std_min + half_span * (p.tanh_raw.array() + 1.0)).matrix();
  p.std = p.log_std.array().exp();
  p.action = (p.mean.array() + p.std.array() * noise.array()).tanh();
  const Eigen::ArrayXXd per =
      -0.5 * noise.array().square() - p.log_std.array() - kHalfLog2Pi -
      (1.0 - p.action.array().square() + kSquashEps).log();
  p.log_prob = per.colwise().sum().transpose();
  return p;
}

}  // namespace

SacAgent make_sac(Rng& rng, int actor_in_dim, int critic_ctx_dim, int action_dim,
                  const std::vector<int>& hidden, const OptimizerParams& actor_opt,
                  const OptimizerParams& critic_opt, double log_std_min, double log_std_max) {
  require(log_std_min < log_std_max, "make_sac: log-std bounds must be ordered");
  SacAgent a;
  a.actor = Mlp(net_sizes(actor_in_dim, hidden, 2 * action_dim), OutputActivation::kLinear, rng);
  a.q1 = Mlp(net_sizes(critic_ctx_dim + action_dim, hidden, 1), OutputActivation::kLinear, rng);
  a.q2 = Mlp(net_sizes(critic_ctx_dim + action_dim, hidden, 1), OutputActivation::kLinear, rng);
  a.q1_target = a.q1;
  a.q2_target = a.q2;
  a.actor_opt = Optimizer(a.actor, actor_opt);
  a.q1_opt = Optimizer(a.q1, critic_opt);
  a.q2_opt = Optimizer(a.q2, critic_opt);
  a.log_std_min = log_std_min;
  a.log_std_max = log_std_max;
  return a;
}

SacAgent make_sac(Rng& rng, int actor_in_dim, int critic_ctx_dim, int action_dim,
                  const TrainSchedule& s) {
  return make_sac(rng, actor_in_dim, critic_ctx_dim, action_dim, s.hidden, actor_optimizer(s),
                  critic_optimizer(s));
}

PolicySample sac_policy(const SacAgent& agent, const Eigen::MatrixXd& actor_in,
                        const Eigen::MatrixXd& noise) {
  const PolicyTerms t = policy_terms(agent, agent.actor.forward(actor_in), noise);
  return {t.action, t.log_prob, t.mean.array().tanh()};
}

Eigen::VectorXd sac_sample(Rng& rng, const SacAgent& agent, const Eigen::VectorXd& actor_in) {
  const Eigen::MatrixXd noise = standard_normal(rng, agent.action_dim(), 1);
  return sac_policy(agent, Eigen::MatrixXd(actor_in), noise).action.col(0);
}

Eigen::VectorXd sac_act(const SacAgent& agent, const Eigen::VectorXd& actor_in) {
  const Eigen::VectorXd head = agent.actor.forward(actor_in);
  return head.head(agent.action_dim()).array().tanh();
}

Eigen::VectorXd sac_targets(Rng& rng, const SacAgent& agent, const ConditionedBatch& batch,
                            double gamma, double alpha) {
  const Eigen::MatrixXd noise = standard_normal(rng, agent.action_dim(), batch.size());
  const PolicySample next = sac_policy(agent, batch.next_actor_in, noise);
  const Eigen::MatrixXd in = vstack({&batch.next_critic_ctx, &next.action});
  const Eigen::MatrixXd q1 = agent.q1_target.forward(in);
  const Eigen::MatrixXd q2 = agent.q2_target.forward(in);
  Eigen::VectorXd y = batch.rewards;
  for (Eigen::Index j = 0; j < y.size(); ++j)
    if (batch.done(j) == 0.0)
      y(j) += gamma * (std::min(q1(0, j), q2(0, j)) - alpha * next.log_prob(j));
  return y;
}

WeightSet sac_actor_gradient(const SacAgent& agent, const Eigen::MatrixXd& actor_in,
                             const Eigen::MatrixXd& critic_ctx, const Eigen::MatrixXd& noise,
                             double alpha, double* loss) {
  const Eigen::Index d = agent.action_dim();
  const auto n = actor_in.cols();
  const double inv_n = 1.0 / static_cast<double>(n);
  Mlp::Cache actor_cache;
  const Eigen::MatrixXd head = agent.actor.forward(actor_in, actor_cache);
  const PolicyTerms p = policy_terms(agent, head, noise);

  const Eigen::MatrixXd in = vstack({&critic_ctx, &p.action});
  Mlp::Cache c1;
  Mlp::Cache c2;
  const Eigen::MatrixXd q1 = agent.q1.forward(in, c1);
  const Eigen::MatrixXd q2 = agent.q2.forward(in, c2);
  Eigen::MatrixXd up1 = Eigen::MatrixXd::Zero(1, n);
  Eigen::MatrixXd up2 = Eigen::MatrixXd::Zero(1, n);
  double total = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (q1(0, j) <= q2(0, j)) {
      up1(0, j) = 1.0;
      total += alpha * p.log_prob(j) - q1(0, j);
    } else {
      up2(0, j) = 1.0;
      total += alpha * p.log_prob(j) - q2(0, j);
    }
  }
  if (loss) *loss = total * inv_n;
  const Eigen::MatrixXd q_a =
      agent.q1.backward(c1, up1).dx.bottomRows(d) + agent.q2.backward(c2, up2).dx.bottomRows(d);

  const Eigen::ArrayXXd t = p.action.array();
  const Eigen::ArrayXXd one_minus = 1.0 - t.square();
  const Eigen::ArrayXXd squash = 2.0 * t * one_minus / (one_minus + kSquashEps);
  const Eigen::ArrayXXd sigma_eps = p.std.array() * noise.array();
  const Eigen::ArrayXXd d_mean = alpha * squash - q_a.array() * one_minus;
  const Eigen::ArrayXXd d_log_std = alpha * (-1.0 + squash * sigma_eps) - q_a.array() * one_minus * sigma_eps;
  const double half_span = 0.5 * (agent.log_std_max - agent.log_std_min);
  Eigen::MatrixXd upstream(2 * d, n);
  upstream.topRows(d) = d_mean.matrix() * inv_n;
  upstream.bottomRows(d) =
      (d_log_std * half_span * (1.0 - p.tanh_raw.array().square())).matrix() * inv_n;
  return agent.actor.backward(actor_cache, upstream).params;
}

double sac_actor_loss(const SacAgent& agent, const Eigen::MatrixXd& actor_in,
                      const Eigen::MatrixXd& critic_ctx, const Eigen::MatrixXd& noise,
                      double alpha) {
  const PolicySample p = sac_policy(agent, actor_in, noise);
  const Eigen::MatrixXd in = vstack({&critic_ctx, &p.action});
  const Eigen::MatrixXd q1 = agent.q1.forward(in);
  const Eigen::MatrixXd q2 = agent.q2.forward(in);
  double total = 0.0;
  for (Eigen::Index j = 0; j < in.cols(); ++j)
    total += alpha * p.log_prob(j) - std::min(q1(0, j), q2(0, j));
  return total / static_cast<double>(in.cols());
}

SacLosses sac_update(Rng& rng, SacAgent& agent, const ConditionedBatch& batch, double gamma,
                     double tau, double alpha) {
  require(batch.size() > 0, "sac_update: empty batch");
  require(batch.actions.rows() == agent.action_dim(), "sac_update: action dimension mismatch");
  SacLosses out;
  const Eigen::VectorXd y = sac_targets(rng, agent, batch, gamma, alpha);
  const Eigen::MatrixXd in = vstack({&batch.critic_ctx, &batch.actions});

  auto critic_step = [&](Mlp& q, Optimizer& opt) {
    double loss = 0.0;
    opt.step(q, regression_gradient(q, in, y, &loss));
    return loss;
  };
  out.q1 = critic_step(agent.q1, agent.q1_opt);
  out.q2 = critic_step(agent.q2, agent.q2_opt);

  const Eigen::MatrixXd noise = standard_normal(rng, agent.action_dim(), batch.size());
  auto ag = sac_actor_gradient(agent, batch.actor_in, batch.actor_ctx(), noise, alpha, &out.actor);
  agent.actor_opt.step(agent.actor, std::move(ag));

  soft_update(agent.q1_target, agent.q1, tau);
  soft_update(agent.q2_target, agent.q2, tau);
  return out;
}

SacLosses sac_update(Rng& rng, SacAgent& agent, const ConditionedBatch& batch,
                     const TrainSchedule& s) {
  return sac_update(rng, agent, batch, s.gamma, s.tau, s.entropy_coef);
}

}  // namespace risiort::learn
