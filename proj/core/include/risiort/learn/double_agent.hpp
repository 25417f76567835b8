#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "risiort/aircomp.hpp"
#include "risiort/learn/ddpg.hpp"
#include "risiort/learn/dqn.hpp"
#include "risiort/learn/sac.hpp"
#include "risiort/learn/schedule.hpp"

// Asynchronous two-agent training for the charging + AirComp environment.
// Agent 1 sets both RIS configurations, Agent 2 sets the energy beam, the
// transmit scalars, the combiner and the denoising factor.
namespace risiort::learn {

enum class Variant { kDoubleSac, kRandomSac, kSingleSac, kDoubleDdpg, kDqnSac };

// Accepts double_sac, random_sac, single_sac, double_ddpg, dqn_sac; throws
// ConfigError otherwise.
Variant parse_variant(const std::string& name);
std::string variant_name(Variant v);

using Case3EnvFactory = std::function<aircomp::AirCompEnv(std::uint64_t seed)>;

// Box layouts, every entry in [-1, 1].
// Agent 1: 2N phases, theta = pi (x + 1), downlink block first.
// Agent 2: Re w, Im w (M each), Re a, Im a (M each), K transmit gains, one
// log-scale denoising entry. b_k = (x_k + 1) sqrt(eta) / |a^H h_k| with the
// phase of a^H h_k cancelled, h_k being the estimated uplink channel, and
// |b_k| capped at the geometric b_max.
struct ActionLayout {
  int antennas = 0;
  int elements = 0;
  int robots = 0;

  int agent1_dim() const { return 2 * elements; }
  int agent2_dim() const { return 4 * antennas + robots + 1; }
};

ActionLayout layout_of(const aircomp::Case3Config& cfg);

aircomp::Agent1Action decode_agent1(const ActionLayout& l, const Eigen::VectorXd& x);
Eigen::VectorXd encode_agent1(const ActionLayout& l, const aircomp::Agent1Action& a);
aircomp::Agent2Action decode_agent2(const ActionLayout& l, const Eigen::VectorXd& x,
                                    const aircomp::ActionScales& scales,
                                    const aircomp::Agent1Action& agent1,
                                    const std::vector<ChannelSet>& estimated_csi,
                                    double bs_power_budget);

// log10 range of eta around eta_ref covered by the box.
inline constexpr double kEtaDecades = 3.0;

struct DoubleAgentMetrics {
  std::vector<double> episode_mse;     // mean realized MSE per episode
  std::vector<double> episode_reward;  // mean stored reward per episode
};

struct DoubleAgents {
  Variant variant = Variant::kDoubleSac;
  std::optional<SacAgent> sac1;   // double_sac
  std::optional<SacAgent> sac2;   // double_sac, random_sac, dqn_sac; single_sac uses it alone
  std::optional<DdpgAgent> ddpg1; // double_ddpg
  std::optional<DdpgAgent> ddpg2; // double_ddpg
  std::optional<DqnAgent> dqn1;   // dqn_sac
};

struct DoubleAgentResult {
  DoubleAgents agents;
  DoubleAgentMetrics metrics;
};

// Each episode is min(steps_per_episode, env episode_length) steps long.
DoubleAgentResult double_agent_train(const Case3EnvFactory& factory, const TrainSchedule& sched,
                                     Variant variant);

// Mean over the last ceil(10%) of the series.
double final_window_mean(const std::vector<double>& series);

// Largest per-agent codebook the DQN variant accepts (2N one-bit phases).
inline constexpr int kMaxDqnPhaseBits = 12;

}  // namespace risiort::learn
