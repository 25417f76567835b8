#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "risiort/channel.hpp"
#include "risiort/geometry.hpp"
#include "risiort/random.hpp"
#include "risiort/ris_config.hpp"

// Harvest-then-transmit frames: the BS charges the robots over an
// RIS-assisted downlink, then the robots transmit simultaneously so the BS
// receives the sum of their symbols over the air.
namespace risiort::aircomp {

struct Case3Config {
  Topology topology;  // bs_list[0] is the access point, devices are the robots
  LinkParams link;    // noise_power_dbm is the uplink receiver noise
  double tau_dl = 0.5;        // s
  double tau_ul = 0.5;        // s
  double eh_efficiency = 0.5; // zeta, (0, 1]
  AgingParams aging{0.99, 1.0};
  CsiModel csi;
  double bs_power_budget = 1.0;  // W
  double penalty_weight = 10.0;
  int episode_length = 1000;     // steps

  std::size_t robots() const { return topology.devices.size(); }
  Eigen::Index antennas() const { return topology.bs_list.front().antennas; }
  Eigen::Index elements() const { return topology.ris.elements; }
  double noise_watts() const { return link.noise_watts(); }
};

void validate_config(const Case3Config& cfg);

struct Agent1Action {
  RisConfig ris_dl;
  RisConfig ris_ul;
};

struct Agent2Action {
  Eigen::VectorXcd w_dl;  // energy beam, antennas
  Eigen::VectorXcd b;     // per-robot transmit scalars
  Eigen::VectorXcd a;     // receive combiner, antennas
  double eta = 1.0;       // denoising factor
};

struct AgentActions {
  Agent1Action agent1;
  Agent2Action agent2;
};

struct EnvState {
  double previous_mse = 0.0;
  std::vector<ChannelSet> estimated_csi;  // one set per robot, shared BS->RIS block
};

// E_k = zeta tau_d |g_k^H w|^2.
std::vector<double> harvested_energy(const Eigen::VectorXcd& w_dl,
                                     const std::vector<Eigen::VectorXcd>& dl_channels,
                                     double zeta, double tau_d);

// sum_k |a^H h_k b_k / sqrt(eta) - 1|^2 + noise ||a||^2 / eta for the sum of
// unit-variance symbols.
double aircomp_mse(const std::vector<Eigen::VectorXcd>& ul_channels, const Eigen::VectorXcd& b,
                   const Eigen::VectorXcd& a, double eta, double noise);

// Reference magnitudes derived from large-scale geometry, used to map
// normalized agent outputs onto physical actions.
struct ActionScales {
  double w_norm = 1.0;             // sqrt(bs_power_budget)
  std::vector<double> b_max;       // per robot
  double eta_ref = 1.0;
};

struct StepOutcome {
  EnvState state;
  double mse = 0.0;
  double reward = 0.0;
  double penalty = 0.0;  // constraint violation before weighting
  std::vector<double> harvested;
  Eigen::VectorXcd b_applied;
  bool done = false;
};

class AirCompEnv {
 public:
  AirCompEnv(Case3Config cfg, std::uint64_t seed);

  EnvState reset();
  StepOutcome step(const AgentActions& actions);

  const Case3Config& config() const { return cfg_; }
  const std::vector<ChannelSet>& true_channels() const { return channels_; }
  const EnvState& state() const { return state_; }
  int elapsed() const { return elapsed_; }
  bool done() const { return done_; }

  // Normalized state vector: previous MSE then the estimated CSI entries
  // (real, imag) scaled by each block's large-scale amplitude.
  std::vector<double> observation() const;
  std::size_t observation_dim() const;
  ActionScales scales() const;

 private:
  Case3Config cfg_;
  Rng rng_;
  std::vector<ChannelSet> channels_;
  EnvState state_;
  int elapsed_ = 0;
  bool done_ = true;
};

struct OracleResult {
  AgentActions actions;
  double mse = 0.0;
};

// Exhaustive 1-bit RIS search (downlink x uplink) combined with grids over
// MRT-combination energy beams, phase-aligned combiners and the denoising
// factor; b follows in closed form. Grids are nested when the resolution
// doubles. Requires K <= 2 and N <= 4, otherwise throws EnumerationLimit.
OracleResult grid_oracle_mse(const Case3Config& cfg, const std::vector<ChannelSet>& frozen,
                             int grid_resolution);

}  // namespace risiort::aircomp
