#include "risiort/learn/double_agent.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "risiort/error.hpp"
#include "risiort/learn/replay.hpp"
#include "risiort/ris.hpp"

namespace risiort::learn {

namespace {

Eigen::VectorXd to_vec(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Eigen::VectorXd uniform_box(Rng& rng, int n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x(i) = u(rng);
  return x;
}

Eigen::VectorXcd complex_direction(const Eigen::VectorXd& x, Eigen::Index offset, Eigen::Index n) {
  Eigen::VectorXcd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = cd(x(offset + i), x(offset + n + i));
  const double norm = v.norm();
  if (norm > 0.0) return v / norm;
  Eigen::VectorXcd e = Eigen::VectorXcd::Zero(n);
  e(0) = 1.0;
  return e;
}

// tanh(mean) for a whole batch.
Eigen::MatrixXd sac_mean(const SacAgent& agent, const Eigen::MatrixXd& in) {
  return sac_policy(agent, in, Eigen::MatrixXd::Zero(agent.action_dim(), in.cols())).action;
}

Eigen::VectorXd dqn_box(const ActionLayout& l, int index) {
  const int bits = l.agent1_dim();
  Eigen::VectorXd x(bits);
  for (int e = 0; e < bits; ++e) x(e) = ((index >> (bits - 1 - e)) & 1) ? 0.0 : -1.0;
  return x;
}

Eigen::MatrixXd dqn_greedy_box(const ActionLayout& l, const DqnAgent& agent,
                               const Eigen::MatrixXd& states) {
  const Eigen::MatrixXd q = agent.online.forward(states);
  Eigen::MatrixXd out(l.agent1_dim(), states.cols());
  for (Eigen::Index j = 0; j < states.cols(); ++j) {
    Eigen::Index best = 0;
    q.col(j).maxCoeff(&best);
    out.col(j) = dqn_box(l, static_cast<int>(best));
  }
  return out;
}

Eigen::MatrixXd random_box_batch(Rng& rng, const ActionLayout& l, Eigen::Index n) {
  Eigen::MatrixXd out(l.agent1_dim(), n);
  for (Eigen::Index j = 0; j < n; ++j) {
    aircomp::Agent1Action a{random_config(rng, static_cast<std::size_t>(l.elements), std::nullopt),
                            random_config(rng, static_cast<std::size_t>(l.elements), std::nullopt)};
    out.col(j) = encode_agent1(l, a);
  }
  return out;
}

}  // namespace

Variant parse_variant(const std::string& name) {
  if (name == "double_sac") return Variant::kDoubleSac;
  if (name == "random_sac") return Variant::kRandomSac;
  if (name == "single_sac") return Variant::kSingleSac;
  if (name == "double_ddpg") return Variant::kDoubleDdpg;
  if (name == "dqn_sac") return Variant::kDqnSac;
  throw ConfigError("unknown variant '" + name +
                    "' (expected double_sac, random_sac, single_sac, double_ddpg or dqn_sac)");
}

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::kDoubleSac: return "double_sac";
    case Variant::kRandomSac: return "random_sac";
    case Variant::kSingleSac: return "single_sac";
    case Variant::kDoubleDdpg: return "double_ddpg";
    case Variant::kDqnSac: return "dqn_sac";
  }
  return "unknown";
}

ActionLayout layout_of(const aircomp::Case3Config& cfg) {
  return {static_cast<int>(cfg.antennas()), static_cast<int>(cfg.elements()),
          static_cast<int>(cfg.robots())};
}

aircomp::Agent1Action decode_agent1(const ActionLayout& l, const Eigen::VectorXd& x) {
  require(x.size() == l.agent1_dim(), "decode_agent1: dimension mismatch");
  aircomp::Agent1Action a;
  for (int i = 0; i < l.elements; ++i) {
    a.ris_dl.phases.push_back(kPi * (std::clamp(x(i), -1.0, 1.0) + 1.0));
    a.ris_ul.phases.push_back(kPi * (std::clamp(x(l.elements + i), -1.0, 1.0) + 1.0));
  }
  return a;
}

Eigen::VectorXd encode_agent1(const ActionLayout& l, const aircomp::Agent1Action& a) {
  require(a.ris_dl.element_count() == static_cast<std::size_t>(l.elements) &&
              a.ris_ul.element_count() == static_cast<std::size_t>(l.elements),
          "encode_agent1: dimension mismatch");
  auto enc = [](double theta) {
    double t = std::fmod(theta, kTwoPi);
    if (t < 0.0) t += kTwoPi;
    return t / kPi - 1.0;
  };
  Eigen::VectorXd x(l.agent1_dim());
  for (int i = 0; i < l.elements; ++i) {
    x(i) = enc(a.ris_dl.phases[static_cast<std::size_t>(i)]);
    x(l.elements + i) = enc(a.ris_ul.phases[static_cast<std::size_t>(i)]);
  }
  return x;
}

aircomp::Agent2Action decode_agent2(const ActionLayout& l, const Eigen::VectorXd& x,
                                    const aircomp::ActionScales& scales,
                                    const aircomp::Agent1Action& agent1,
                                    const std::vector<ChannelSet>& estimated_csi,
                                    double bs_power_budget) {
  require(x.size() == l.agent2_dim(), "decode_agent2: dimension mismatch");
  require(estimated_csi.size() == static_cast<std::size_t>(l.robots) &&
              scales.b_max.size() == static_cast<std::size_t>(l.robots),
          "decode_agent2: one channel estimate and one scale per robot required");
  const Eigen::Index m = l.antennas;
  aircomp::Agent2Action a;
  a.w_dl = std::sqrt(bs_power_budget) * complex_direction(x, 0, m);
  a.a = complex_direction(x, 2 * m, m);
  a.eta = scales.eta_ref * std::pow(10.0, kEtaDecades * std::clamp(x(4 * m + l.robots), -1.0, 1.0));
  a.b.resize(l.robots);
  for (int k = 0; k < l.robots; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const double gain_scale = std::clamp(x(4 * m + k), -1.0, 1.0) + 1.0;
    const cd gain = a.a.dot(effective_channel(estimated_csi[ku], agent1.ris_ul));
    const double inversion = std::abs(gain) > 0.0 ? std::sqrt(a.eta) / std::abs(gain) : scales.b_max[ku];
    a.b(k) = std::polar(std::min(gain_scale * inversion, scales.b_max[ku]), -std::arg(gain));
  }
  return a;
}

double final_window_mean(const std::vector<double>& series) {
  require(!series.empty(), "final_window_mean: empty series");
  const std::size_t n = std::max<std::size_t>(1, (series.size() + 9) / 10);
  double s = 0.0;
  for (std::size_t i = series.size() - n; i < series.size(); ++i) s += series[i];
  return s / static_cast<double>(n);
}

DoubleAgentResult double_agent_train(const Case3EnvFactory& factory, const TrainSchedule& sched,
                                     Variant variant) {
  validate_schedule(sched);
  aircomp::AirCompEnv env = factory(derive_seed(sched.seed, 0));
  const auto& cfg = env.config();
  const ActionLayout lay = layout_of(cfg);
  const int d1 = lay.agent1_dim();
  const int d2 = lay.agent2_dim();
  const int s_dim = static_cast<int>(env.observation_dim());
  const aircomp::ActionScales scales = env.scales();

  Rng rng(derive_seed(sched.seed, 1));
  DoubleAgentResult res;
  DoubleAgents& ag = res.agents;
  ag.variant = variant;
  switch (variant) {
    case Variant::kDoubleSac:
      ag.sac1 = make_sac(rng, s_dim, s_dim + d2, d1, sched);
      ag.sac2 = make_sac(rng, s_dim + d1, s_dim + d1, d2, sched);
      break;
    case Variant::kRandomSac:
      ag.sac2 = make_sac(rng, s_dim + d1, s_dim + d1, d2, sched);
      break;
    case Variant::kSingleSac:
      ag.sac2 = make_sac(rng, s_dim, s_dim, d1 + d2, sched);
      break;
    case Variant::kDoubleDdpg:
      ag.ddpg1 = make_ddpg(rng, s_dim, s_dim + d2, d1, sched);
      ag.ddpg2 = make_ddpg(rng, s_dim + d1, s_dim + d1, d2, sched);
      break;
    case Variant::kDqnSac:
      if (d1 > kMaxDqnPhaseBits)
        throw EnumerationLimit("dqn_sac: 2N one-bit phases exceed the DQN codebook guard",
                               kMaxDqnPhaseBits);
      ag.dqn1 = make_dqn(rng, s_dim, 1 << d1, sched);
      ag.sac2 = make_sac(rng, s_dim + d1, s_dim + d1, d2, sched);
      break;
  }

  const bool with_index = variant == Variant::kDqnSac;
  ReplayBuffer buf(static_cast<std::size_t>(sched.replay_capacity), s_dim, d1 + d2 + (with_index ? 1 : 0));
  const auto batch_size = static_cast<std::size_t>(sched.batch_size);
  const int steps_per_episode = std::min(sched.steps_per_episode, cfg.episode_length);

  auto update = [&]() {
    const Batch b = buf.sample(rng, batch_size);
    const Eigen::MatrixXd a1 = b.actions.topRows(d1);
    const Eigen::MatrixXd a2 = b.actions.middleRows(d1, d2);
    const Eigen::MatrixXd& s = b.states;
    const Eigen::MatrixXd& s2 = b.next_states;
    switch (variant) {
      case Variant::kSingleSac:
        sac_update(rng, *ag.sac2, unconditioned(b), sched);
        return;
      case Variant::kDoubleSac: {
        // Agent 1 first, conditioned on Agent 2's stored action.
        Eigen::MatrixXd next_a1 = sac_mean(*ag.sac1, s2);
        const Eigen::MatrixXd next_a2 = sac_mean(*ag.sac2, vstack({&s2, &next_a1}));
        sac_update(rng, *ag.sac1,
                   {s, vstack({&s, &a2}), a1, b.rewards, b.done, s2, vstack({&s2, &next_a2}), {}},
                   sched);
        // Agent 2 next, conditioned on Agent 1's refreshed choice.
        const Eigen::MatrixXd new_a1 = sac_mean(*ag.sac1, s);
        next_a1 = sac_mean(*ag.sac1, s2);
        const Eigen::MatrixXd ctx_new = vstack({&s, &new_a1});
        const Eigen::MatrixXd next_ctx = vstack({&s2, &next_a1});
        sac_update(rng, *ag.sac2,
                   {ctx_new, vstack({&s, &a1}), a2, b.rewards, b.done, next_ctx, next_ctx, ctx_new},
                   sched);
        return;
      }
      case Variant::kDoubleDdpg: {
        Eigen::MatrixXd next_a1 = ag.ddpg1->actor_target.forward(s2);
        const Eigen::MatrixXd next_a2 = ag.ddpg2->actor_target.forward(vstack({&s2, &next_a1}));
        ddpg_update(*ag.ddpg1,
                    {s, vstack({&s, &a2}), a1, b.rewards, b.done, s2, vstack({&s2, &next_a2}), {}},
                    sched);
        const Eigen::MatrixXd new_a1 = ag.ddpg1->actor.forward(s);
        next_a1 = ag.ddpg1->actor_target.forward(s2);
        const Eigen::MatrixXd ctx_new = vstack({&s, &new_a1});
        const Eigen::MatrixXd next_ctx = vstack({&s2, &next_a1});
        ddpg_update(*ag.ddpg2,
                    {ctx_new, vstack({&s, &a1}), a2, b.rewards, b.done, next_ctx, next_ctx, ctx_new},
                    sched);
        return;
      }
      case Variant::kRandomSac: {
        // The next RIS draw is exogenous: sample it afresh.
        const Eigen::MatrixXd next_a1 = random_box_batch(rng, lay, b.size());
        const Eigen::MatrixXd ctx = vstack({&s, &a1});
        const Eigen::MatrixXd next_ctx = vstack({&s2, &next_a1});
        sac_update(rng, *ag.sac2, {ctx, ctx, a2, b.rewards, b.done, next_ctx, next_ctx, {}}, sched);
        return;
      }
      case Variant::kDqnSac: {
        Batch b1 = b;
        b1.actions = b.actions.bottomRows(1);
        dqn_update(*ag.dqn1, b1, sched);
        const Eigen::MatrixXd new_a1 = dqn_greedy_box(lay, *ag.dqn1, s);
        const Eigen::MatrixXd next_a1 = dqn_greedy_box(lay, *ag.dqn1, s2);
        const Eigen::MatrixXd ctx_new = vstack({&s, &new_a1});
        const Eigen::MatrixXd next_ctx = vstack({&s2, &next_a1});
        sac_update(rng, *ag.sac2,
                   {ctx_new, vstack({&s, &a1}), a2, b.rewards, b.done, next_ctx, next_ctx, ctx_new},
                   sched);
        return;
      }
    }
  };

  long step = 0;
  for (int ep = 0; ep < sched.episodes; ++ep) {
    env.reset();
    Eigen::VectorXd s = to_vec(env.observation());
    double mse_sum = 0.0;
    double reward_sum = 0.0;
    for (int t = 0; t < steps_per_episode; ++t) {
      const bool warm = step < sched.warmup_steps;
      Eigen::VectorXd a1;
      Eigen::VectorXd a2;
      int index = 0;
      switch (variant) {
        case Variant::kDoubleSac:
          a1 = warm ? uniform_box(rng, d1) : sac_sample(rng, *ag.sac1, s);
          break;
        case Variant::kDoubleDdpg:
          a1 = warm ? uniform_box(rng, d1) : ddpg_explore(rng, *ag.ddpg1, s, sched.exploration_noise);
          break;
        case Variant::kRandomSac:
          a1 = random_box_batch(rng, lay, 1).col(0);
          break;
        case Variant::kDqnSac: {
          std::uniform_int_distribution<int> pick(0, (1 << d1) - 1);
          index = warm ? pick(rng) : epsilon_greedy(rng, *ag.dqn1, s, epsilon_at(sched, step));
          a1 = dqn_box(lay, index);
          break;
        }
        case Variant::kSingleSac: {
          const Eigen::VectorXd joint = warm ? uniform_box(rng, d1 + d2) : sac_sample(rng, *ag.sac2, s);
          a1 = joint.head(d1);
          a2 = joint.tail(d2);
          break;
        }
      }
      if (variant != Variant::kSingleSac) {
        const Eigen::VectorXd in = (Eigen::VectorXd(s.size() + d1) << s, a1).finished();
        if (warm)
          a2 = uniform_box(rng, d2);
        else if (variant == Variant::kDoubleDdpg)
          a2 = ddpg_explore(rng, *ag.ddpg2, in, sched.exploration_noise);
        else
          a2 = sac_sample(rng, *ag.sac2, in);
      }

      aircomp::AgentActions acts;
      acts.agent1 = decode_agent1(lay, a1);
      acts.agent2 = decode_agent2(lay, a2, scales, acts.agent1, env.state().estimated_csi,
                                  cfg.bs_power_budget);
      const aircomp::StepOutcome out = env.step(acts);
      const double r = std::max(out.reward, sched.reward_floor);
      const Eigen::VectorXd s2 = to_vec(env.observation());

      Eigen::VectorXd stored(d1 + d2 + (with_index ? 1 : 0));
      stored.head(d1) = a1;
      stored.segment(d1, d2) = a2;
      if (with_index) stored(d1 + d2) = index;
      // The fixed episode length is a truncation, never a terminal state.
      buf.push({s, stored, r, s2, false});

      mse_sum += out.mse;
      reward_sum += r;
      ++step;
      if (!warm && step % sched.update_every == 0 && buf.size() >= batch_size) update();
      s = s2;
    }
    res.metrics.episode_mse.push_back(mse_sum / steps_per_episode);
    res.metrics.episode_reward.push_back(reward_sum / steps_per_episode);
  }
  return res;
}

}  // namespace risiort::learn
