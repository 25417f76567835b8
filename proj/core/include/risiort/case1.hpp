#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "risiort/channel.hpp"
#include "risiort/geometry.hpp"
#include "risiort/random.hpp"
#include "risiort/ris.hpp"

// Multi-robot trajectory + downlink NOMA/OMA environment served by BS 0
// through one RIS.
namespace risiort::case1 {

enum class AccessMode { kNoma, kOma };

// 8 compass headings plus STAY. North is +y, east is +x.
enum class Heading : int { kN = 0, kNE, kE, kSE, kS, kSW, kW, kNW, kStay };
inline constexpr int kHeadingCount = 9;

struct RewardWeights {
  double rate_w = 1.0;
  double time_penalty_w = 0.1;
  double goal_bonus = 10.0;
};

struct Area {
  Position min;
  Position max;
};

struct Case1Config {
  Topology topology;  // devices hold the robots' start positions
  LinkParams link;
  std::vector<Position> destinations;
  int deadline = 50;              // steps
  double speed = 1.0;             // m/s
  double decision_interval = 1.0; // s
  std::vector<double> power_levels{0.0, 0.05, 0.1};  // W
  double max_power_dbm = 30.0;
  AccessMode access_mode = AccessMode::kNoma;
  double motion_power = 1.0;   // W
  double circuit_power = 0.1;  // W
  RewardWeights reward_weights;
  int ris_bits = 2;
  double arrival_radius = 0.5;  // m
  std::optional<Area> area;     // moves leaving the area are blocked

  std::size_t robot_count() const { return topology.devices.size(); }
  double budget_watts() const { return dbm_to_watts(max_power_dbm); }
  double step_length() const { return speed * decision_interval; }
};

void validate_config(const Case1Config& cfg);

struct RobotState {
  Position position;
  Position destination;
  bool arrived = false;
  double cumulative_bits = 0.0;
  double cumulative_energy = 0.0;  // J
  int elapsed = 0;
};

struct GlobalAction {
  std::vector<int> ris_phase_indices;  // length N
  std::vector<int> decoding_order;     // robot indices, first decoded first; empty = gain-sorted
};

struct LocalAction {
  Heading heading = Heading::kStay;
  int power_index = 0;
};

struct Observation {
  std::vector<double> global;
  std::vector<std::vector<double>> local;
};

struct StepResult {
  Observation observation;
  double global_reward = 0.0;
  std::vector<double> local_rewards;
  std::vector<double> rates;  // bits/s/Hz
  std::vector<bool> arrived_now;
  bool done = false;
};

// Downlink NOMA with SIC in `order`: the robot decoded at position i is
// interfered only by robots decoded after i.
std::vector<double> sum_rate_noma(const std::vector<double>& gains,
                                  const std::vector<double>& powers,
                                  const std::vector<int>& order, double noise);

// Equal orthogonal shares over the robots in `gains`.
std::vector<double> sum_rate_oma(const std::vector<double>& gains,
                                 const std::vector<double>& powers, double noise);

double energy_efficiency(double bits, double joules);
double global_reward(const std::vector<double>& rates);
double local_reward(double rate, bool arrived_now, const RewardWeights& w);

// Robot indices sorted by ascending gain (weakest decoded first); stable.
std::vector<int> gain_sorted_order(const std::vector<double>& gains);

std::vector<int> valid_power_indices(const Case1Config& cfg);

// Enumerates global actions: RIS codebook indices (last element fastest)
// times decoding-order permutations when K <= kMaxOrderedRobots.
class GlobalActionSpace {
 public:
  static constexpr std::size_t kMaxOrderedRobots = 4;
  static constexpr std::size_t kMaxActions = 4096;

  GlobalActionSpace(std::size_t elements, int bits, std::size_t robots);
  std::size_t size() const { return size_; }
  GlobalAction decode(std::size_t index) const;

 private:
  std::size_t elements_;
  int bits_;
  std::size_t ris_count_;
  std::vector<std::vector<int>> orders_;
  std::size_t size_;
};

inline std::size_t local_action_count(const Case1Config& cfg) {
  return static_cast<std::size_t>(kHeadingCount) * cfg.power_levels.size();
}
LocalAction decode_local_action(const Case1Config& cfg, std::size_t index);

class TrajectoryEnv {
 public:
  TrajectoryEnv(Case1Config cfg, std::uint64_t seed);

  Observation reset();
  StepResult step(const GlobalAction& global, const std::vector<LocalAction>& local);

  const Case1Config& config() const { return cfg_; }
  const std::vector<RobotState>& robots() const { return robots_; }
  const std::vector<ChannelSet>& channels() const { return channels_; }
  bool done() const { return done_; }
  int elapsed() const { return elapsed_; }

  std::size_t global_state_dim() const { return 3 * cfg_.robot_count(); }
  static constexpr std::size_t local_state_dim() { return 5; }

  double total_bits() const;
  double total_energy() const;
  // System EE of the episode so far; 0 before any energy is spent.
  double episode_energy_efficiency() const;
  double arrival_fraction() const;

  Observation observe() const;

 private:
  void resample_channels();
  std::vector<double> effective_gains(const RisConfig& ris) const;

  Case1Config cfg_;
  Rng rng_;
  std::vector<RobotState> robots_;
  std::vector<ChannelSet> channels_;
  Topology live_topology_;
  int elapsed_ = 0;
  bool done_ = true;
};

// Highest step energy efficiency (sum rate over total power) reachable by
// exhaustive search over the discrete power grid and, for NOMA, both SIC
// orders. Power combinations whose sum exceeds the budget are excluded.
double exhaustive_max_ee(const std::vector<double>& gains, const std::vector<double>& levels,
                         double budget_watts, double noise, double circuit_power,
                         AccessMode mode);

// Episode EE of an exhaustive policy on a fixed shortest axis-aligned path:
// per-step RIS configuration, power allocation and decoding order are chosen
// by enumeration, and the ratio of total bits to total energy is maximized
// exactly with Dinkelbach iterations. Channels along the path are drawn from
// `channel_seed` and do not depend on the budget.
double exhaustive_policy_ee(const Case1Config& cfg, std::uint64_t channel_seed);

}  // namespace risiort::case1
