#include "risiort/case1.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>
#include <string>
#include <utility>

#include "risiort/error.hpp"

namespace risiort::case1 {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

struct Dir {
  double dx;
  double dy;
};

constexpr Dir kDirections[kHeadingCount] = {
    {0.0, 1.0},   {kInvSqrt2, kInvSqrt2},   {1.0, 0.0},  {kInvSqrt2, -kInvSqrt2},
    {0.0, -1.0},  {-kInvSqrt2, -kInvSqrt2}, {-1.0, 0.0}, {-kInvSqrt2, kInvSqrt2},
    {0.0, 0.0}};

bool is_permutation_of_range(const std::vector<int>& order, std::size_t k) {
  if (order.size() != k) return false;
  std::vector<bool> seen(k, false);
  for (int v : order) {
    if (v < 0 || static_cast<std::size_t>(v) >= k || seen[v]) return false;
    seen[v] = true;
  }
  return true;
}

bool inside_area(const std::optional<Area>& area, const Position& p) {
  if (!area) return true;
  return p.x >= area->min.x && p.x <= area->max.x && p.y >= area->min.y && p.y <= area->max.y;
}

// Blocked when the move leaves the area or its segment touches an obstacle.
bool move_blocked(const Case1Config& cfg, const Position& from, const Position& to) {
  if (!inside_area(cfg.area, to)) return true;
  return los_blocked(cfg.topology, from, to);
}

double map_scale(const Case1Config& cfg) {
  if (!cfg.area) return 10.0;
  return std::max({cfg.area->max.x - cfg.area->min.x, cfg.area->max.y - cfg.area->min.y, 1e-9});
}

double channel_feature(const ChannelSet& cs, const LinkParams& lp) {
  const double gain = cs.h_direct.squaredNorm() / static_cast<double>(cs.antennas());
  if (!(gain > 0.0)) return -4.0;
  const double rel_db = 10.0 * std::log10(gain) + lp.ref_loss_db;
  return std::clamp(rel_db / 40.0, -4.0, 1.0);
}

long long factorial(std::size_t k) {
  long long f = 1;
  for (std::size_t i = 2; i <= k; ++i) f *= static_cast<long long>(i);
  return f;
}

std::vector<std::vector<int>> all_orders(std::size_t k) {
  std::vector<int> p(k);
  std::iota(p.begin(), p.end(), 0);
  std::vector<std::vector<int>> out;
  do {
    out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

}  // namespace

void validate_config(const Case1Config& cfg) {
  validate_topology(cfg.topology);
  validate_link_params(cfg.link);
  const std::size_t k = cfg.robot_count();
  if (k < 1) throw ConfigError("case1: at least one robot (topology.devices) required");
  if (cfg.destinations.size() != k)
    throw ConfigError("case1.destinations: expected " + std::to_string(k) + " entries, got " +
                      std::to_string(cfg.destinations.size()));
  if (cfg.deadline < 1) throw ConfigError("case1.deadline must be >= 1");
  if (!(cfg.speed > 0.0)) throw ConfigError("case1.speed must be > 0");
  if (!(cfg.decision_interval > 0.0)) throw ConfigError("case1.decision_interval must be > 0");
  if (cfg.power_levels.empty()) throw ConfigError("case1.power_levels must not be empty");
  const double budget = cfg.budget_watts();
  for (std::size_t i = 0; i < cfg.power_levels.size(); ++i) {
    const double p = cfg.power_levels[i];
    if (!(p >= 0.0)) throw ConfigError("case1.power_levels[" + std::to_string(i) + "] must be >= 0");
    if (p > budget * (1.0 + 1e-12))
      throw ConfigError("case1.power_levels[" + std::to_string(i) + "] exceeds max_power_dbm budget");
  }
  if (cfg.motion_power < 0.0 || cfg.circuit_power < 0.0)
    throw ConfigError("case1: motion_power and circuit_power must be >= 0");
  if (cfg.ris_bits < 1) throw ConfigError("case1.ris_bits must be >= 1");
  if (!(cfg.arrival_radius >= 0.0)) throw ConfigError("case1.arrival_radius must be >= 0");
  for (std::size_t i = 0; i < k; ++i) {
    for (const auto& o : cfg.topology.obstacles) {
      if (o.contains_interior(cfg.topology.devices[i]))
        throw ConfigError("case1: start position of robot " + std::to_string(i) +
                          " lies inside an obstacle");
      if (o.contains_interior(cfg.destinations[i]))
        throw ConfigError("case1: destination of robot " + std::to_string(i) +
                          " lies inside an obstacle");
    }
  }
}

std::vector<double> sum_rate_noma(const std::vector<double>& gains,
                                  const std::vector<double>& powers,
                                  const std::vector<int>& order, double noise) {
  const std::size_t k = gains.size();
  require(powers.size() == k, "sum_rate_noma: gains/powers size mismatch");
  require(is_permutation_of_range(order, k), "sum_rate_noma: decoding order is not a permutation");
  std::vector<double> rates(k, 0.0);
  for (std::size_t pos = 0; pos < k; ++pos) {
    const auto r = static_cast<std::size_t>(order[pos]);
    require(powers[r] >= 0.0, "sum_rate_noma: negative power");
    double interference = 0.0;
    for (std::size_t later = pos + 1; later < k; ++later)
      interference += powers[static_cast<std::size_t>(order[later])] * gains[r];
    rates[r] = std::log2(1.0 + powers[r] * gains[r] / (interference + noise));
  }
  return rates;
}

std::vector<double> sum_rate_oma(const std::vector<double>& gains,
                                 const std::vector<double>& powers, double noise) {
  const std::size_t k = gains.size();
  require(powers.size() == k, "sum_rate_oma: gains/powers size mismatch");
  std::vector<double> rates(k, 0.0);
  if (k == 0) return rates;
  const double share = 1.0 / static_cast<double>(k);
  for (std::size_t i = 0; i < k; ++i) {
    require(powers[i] >= 0.0, "sum_rate_oma: negative power");
    rates[i] = share * std::log2(1.0 + powers[i] * gains[i] / (share * noise));
  }
  return rates;
}

double energy_efficiency(double bits, double joules) {
  require(joules > 0.0, "energy_efficiency: energy must be > 0");
  return bits / joules;
}

double global_reward(const std::vector<double>& rates) {
  return std::accumulate(rates.begin(), rates.end(), 0.0);
}

double local_reward(double rate, bool arrived_now, const RewardWeights& w) {
  return w.rate_w * rate - w.time_penalty_w + (arrived_now ? w.goal_bonus : 0.0);
}

std::vector<int> gain_sorted_order(const std::vector<double>& gains) {
  std::vector<int> order(gains.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return gains[a] < gains[b]; });
  return order;
}

std::vector<int> valid_power_indices(const Case1Config& cfg) {
  std::vector<int> out;
  const double budget = cfg.budget_watts();
  for (std::size_t i = 0; i < cfg.power_levels.size(); ++i)
    if (cfg.power_levels[i] <= budget * (1.0 + 1e-12)) out.push_back(static_cast<int>(i));
  return out;
}

GlobalActionSpace::GlobalActionSpace(std::size_t elements, int bits, std::size_t robots)
    : elements_(elements), bits_(bits) {
  require(bits >= 1, "GlobalActionSpace: bit depth must be >= 1");
  const double ris_log2 = static_cast<double>(elements) * bits;
  const double order_count =
      robots <= kMaxOrderedRobots ? static_cast<double>(factorial(robots)) : 1.0;
  if (ris_log2 > 30.0 || std::exp2(ris_log2) * order_count > static_cast<double>(kMaxActions))
    throw ConfigError("case1: global action space (RIS codebook x decoding orders) exceeds " +
                      std::to_string(kMaxActions) + " actions; reduce ris elements or bits");
  ris_count_ = std::size_t{1} << (elements * static_cast<std::size_t>(bits));
  if (robots <= kMaxOrderedRobots) orders_ = all_orders(robots);
  size_ = ris_count_ * std::max<std::size_t>(orders_.size(), 1);
}

GlobalAction GlobalActionSpace::decode(std::size_t index) const {
  require(index < size_, "GlobalActionSpace::decode: index out of range");
  GlobalAction a;
  std::size_t ris_index = index % ris_count_;
  const std::size_t order_index = index / ris_count_;
  const std::size_t levels = std::size_t{1} << bits_;
  a.ris_phase_indices.assign(elements_, 0);
  for (std::size_t e = elements_; e-- > 0;) {
    a.ris_phase_indices[e] = static_cast<int>(ris_index % levels);
    ris_index /= levels;
  }
  if (!orders_.empty()) a.decoding_order = orders_[order_index];
  return a;
}

LocalAction decode_local_action(const Case1Config& cfg, std::size_t index) {
  require(index < local_action_count(cfg), "decode_local_action: index out of range");
  const std::size_t levels = cfg.power_levels.size();
  return {static_cast<Heading>(index / levels), static_cast<int>(index % levels)};
}

TrajectoryEnv::TrajectoryEnv(Case1Config cfg, std::uint64_t seed)
    : cfg_(std::move(cfg)), rng_(seed) {
  validate_config(cfg_);
  live_topology_ = cfg_.topology;
}

void TrajectoryEnv::resample_channels() {
  for (std::size_t k = 0; k < robots_.size(); ++k)
    live_topology_.devices[k] = robots_[k].position;
  channels_ = sample_channels(rng_, live_topology_, cfg_.link, 0);
}

Observation TrajectoryEnv::observe() const {
  const double scale = map_scale(cfg_);
  Observation obs;
  obs.global.reserve(global_state_dim());
  obs.local.reserve(robots_.size());
  for (std::size_t k = 0; k < robots_.size(); ++k) {
    const auto& r = robots_[k];
    const double f = channel_feature(channels_[k], cfg_.link);
    obs.global.push_back(r.position.x / scale);
    obs.global.push_back(r.position.y / scale);
    obs.global.push_back(f);
    obs.local.push_back({(r.position.x - r.destination.x) / scale,
                         (r.position.y - r.destination.y) / scale, r.position.x / scale,
                         r.position.y / scale, f});
  }
  return obs;
}

Observation TrajectoryEnv::reset() {
  robots_.clear();
  for (std::size_t k = 0; k < cfg_.robot_count(); ++k) {
    RobotState r;
    r.position = cfg_.topology.devices[k];
    r.destination = cfg_.destinations[k];
    r.arrived = distance(r.position, r.destination) <= cfg_.arrival_radius;
    robots_.push_back(r);
  }
  elapsed_ = 0;
  done_ = std::all_of(robots_.begin(), robots_.end(), [](const auto& r) { return r.arrived; });
  resample_channels();
  return observe();
}

std::vector<double> TrajectoryEnv::effective_gains(const RisConfig& ris) const {
  std::vector<double> gains;
  gains.reserve(channels_.size());
  for (const auto& cs : channels_)
    gains.push_back(effective_channel(cs, ris).squaredNorm() /
                    static_cast<double>(cs.antennas()));
  return gains;
}

StepResult TrajectoryEnv::step(const GlobalAction& global, const std::vector<LocalAction>& local) {
  require(!done_, "TrajectoryEnv::step: episode is finished; call reset()");
  const std::size_t k = robots_.size();
  require(local.size() == k, "TrajectoryEnv::step: one local action per robot required");
  require(global.ris_phase_indices.size() == static_cast<std::size_t>(cfg_.topology.ris.elements),
          "TrajectoryEnv::step: RIS index vector length must equal N");
  require(global.decoding_order.empty() || is_permutation_of_range(global.decoding_order, k),
          "TrajectoryEnv::step: decoding order is not a permutation");
  for (const auto& a : local) {
    require(static_cast<int>(a.heading) >= 0 && static_cast<int>(a.heading) < kHeadingCount,
            "TrajectoryEnv::step: invalid heading");
    require(a.power_index >= 0 && static_cast<std::size_t>(a.power_index) < cfg_.power_levels.size(),
            "TrajectoryEnv::step: invalid power index");
  }

  StepResult res;
  res.arrived_now.assign(k, false);
  std::vector<bool> active(k, false);
  std::vector<bool> moved(k, false);
  const double step_len = cfg_.step_length();

  for (std::size_t i = 0; i < k; ++i) {
    auto& r = robots_[i];
    if (r.arrived) continue;
    active[i] = true;
    const Dir d = kDirections[static_cast<int>(local[i].heading)];
    if (local[i].heading == Heading::kStay) continue;
    moved[i] = true;
    const Position next{r.position.x + step_len * d.dx, r.position.y + step_len * d.dy,
                        r.position.z};
    if (!move_blocked(cfg_, r.position, next)) r.position = next;
    if (distance(r.position, r.destination) <= cfg_.arrival_radius) {
      r.position = r.destination;
      r.arrived = true;
      res.arrived_now[i] = true;
    }
  }

  resample_channels();
  const RisConfig ris = config_from_indices(global.ris_phase_indices, cfg_.ris_bits);
  const std::vector<double> gains = effective_gains(ris);

  std::vector<double> powers(k, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    if (!active[i]) continue;
    powers[i] = cfg_.power_levels[static_cast<std::size_t>(local[i].power_index)];
    total += powers[i];
  }
  const double budget = cfg_.budget_watts();
  if (total > budget)
    for (double& p : powers) p *= budget / total;

  const double noise = cfg_.link.noise_watts();
  std::vector<double> rates(k, 0.0);
  if (cfg_.access_mode == AccessMode::kNoma) {
    const std::vector<int> order =
        global.decoding_order.empty() ? gain_sorted_order(gains) : global.decoding_order;
    rates = sum_rate_noma(gains, powers, order, noise);
  } else {
    std::vector<double> g;
    std::vector<double> p;
    for (std::size_t i = 0; i < k; ++i)
      if (active[i]) {
        g.push_back(gains[i]);
        p.push_back(powers[i]);
      }
    const std::vector<double> r = sum_rate_oma(g, p, noise);
    for (std::size_t i = 0, j = 0; i < k; ++i)
      if (active[i]) rates[i] = r[j++];
  }

  const double dt = cfg_.decision_interval;
  res.local_rewards.assign(k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    if (!active[i]) continue;
    auto& r = robots_[i];
    r.cumulative_bits += rates[i] * dt;  // 1 Hz reference bandwidth
    r.cumulative_energy +=
        ((moved[i] ? cfg_.motion_power : 0.0) + cfg_.circuit_power + powers[i]) * dt;
    r.elapsed += 1;
    res.local_rewards[i] = local_reward(rates[i], res.arrived_now[i], cfg_.reward_weights);
  }

  ++elapsed_;
  done_ = elapsed_ >= cfg_.deadline ||
          std::all_of(robots_.begin(), robots_.end(), [](const auto& r) { return r.arrived; });
  res.global_reward = global_reward(rates);
  res.rates = std::move(rates);
  res.done = done_;
  res.observation = observe();
  return res;
}

double TrajectoryEnv::total_bits() const {
  double s = 0.0;
  for (const auto& r : robots_) s += r.cumulative_bits;
  return s;
}

double TrajectoryEnv::total_energy() const {
  double s = 0.0;
  for (const auto& r : robots_) s += r.cumulative_energy;
  return s;
}

double TrajectoryEnv::episode_energy_efficiency() const {
  const double e = total_energy();
  return e > 0.0 ? energy_efficiency(total_bits(), e) : 0.0;
}

double TrajectoryEnv::arrival_fraction() const {
  if (robots_.empty()) return 0.0;
  const auto n = std::count_if(robots_.begin(), robots_.end(), [](const auto& r) { return r.arrived; });
  return static_cast<double>(n) / static_cast<double>(robots_.size());
}

namespace {

// Every power combination (indices into `levels`) whose sum fits the budget.
std::vector<std::vector<double>> power_combos(const std::vector<double>& levels,
                                              std::size_t robots, double budget) {
  std::vector<double> usable;
  for (double p : levels)
    if (p <= budget * (1.0 + 1e-12)) usable.push_back(p);
  std::vector<std::vector<double>> out;
  if (usable.empty()) return out;
  std::vector<std::size_t> idx(robots, 0);
  while (true) {
    std::vector<double> p(robots);
    double sum = 0.0;
    for (std::size_t i = 0; i < robots; ++i) sum += (p[i] = usable[idx[i]]);
    if (sum <= budget * (1.0 + 1e-12)) out.push_back(std::move(p));
    std::size_t pos = robots;
    while (pos > 0 && ++idx[pos - 1] == usable.size()) idx[--pos] = 0;
    if (pos == 0) break;
  }
  return out;
}

double best_rate_sum(const std::vector<double>& gains, const std::vector<double>& powers,
                     double noise, AccessMode mode,
                     const std::vector<std::vector<int>>& orders) {
  if (mode == AccessMode::kOma) {
    const auto r = sum_rate_oma(gains, powers, noise);
    return std::accumulate(r.begin(), r.end(), 0.0);
  }
  double best = 0.0;
  for (const auto& order : orders) {
    const auto r = sum_rate_noma(gains, powers, order, noise);
    best = std::max(best, std::accumulate(r.begin(), r.end(), 0.0));
  }
  return best;
}

// Shortest 4-connected lattice path (number of moves) from start to within
// the arrival radius of the destination, honouring obstacles and the area.
std::vector<Position> shortest_path(const Case1Config& cfg, std::size_t robot) {
  const Position start = cfg.topology.devices[robot];
  const Position dest = cfg.destinations[robot];
  const double step = cfg.step_length();
  using Cell = std::pair<int, int>;
  auto at = [&](const Cell& c) {
    return Position{start.x + c.first * step, start.y + c.second * step, start.z};
  };
  std::map<Cell, Cell> parent;
  std::deque<Cell> queue{{0, 0}};
  parent[{0, 0}] = {0, 0};
  const int limit = cfg.deadline;
  constexpr int dx[4] = {0, 1, 0, -1};
  constexpr int dy[4] = {1, 0, -1, 0};
  while (!queue.empty()) {
    const Cell c = queue.front();
    queue.pop_front();
    if (distance(at(c), dest) <= cfg.arrival_radius) {
      std::vector<Position> path;
      for (Cell cur = c; cur != Cell{0, 0}; cur = parent[cur]) path.push_back(at(cur));
      std::reverse(path.begin(), path.end());
      if (!path.empty()) path.back() = dest;
      return path;
    }
    for (int d = 0; d < 4; ++d) {
      const Cell n{c.first + dx[d], c.second + dy[d]};
      if (std::abs(n.first) > limit || std::abs(n.second) > limit || parent.count(n)) continue;
      if (move_blocked(cfg, at(c), at(n))) continue;
      parent[n] = c;
      queue.push_back(n);
    }
  }
  throw ConfigError("case1: no obstacle-free path to destination for robot " +
                    std::to_string(robot));
}

}  // namespace

double exhaustive_max_ee(const std::vector<double>& gains, const std::vector<double>& levels,
                         double budget_watts, double noise, double circuit_power,
                         AccessMode mode) {
  const std::size_t k = gains.size();
  const auto orders = all_orders(k);
  double best = 0.0;
  for (const auto& p : power_combos(levels, k, budget_watts)) {
    const double energy =
        static_cast<double>(k) * circuit_power + std::accumulate(p.begin(), p.end(), 0.0);
    if (!(energy > 0.0)) continue;
    best = std::max(best, energy_efficiency(best_rate_sum(gains, p, noise, mode, orders), energy));
  }
  return best;
}

double exhaustive_policy_ee(const Case1Config& cfg, std::uint64_t channel_seed) {
  validate_config(cfg);
  const std::size_t k = cfg.robot_count();
  const auto n = static_cast<std::size_t>(cfg.topology.ris.elements);
  if (n * static_cast<std::size_t>(cfg.ris_bits) > 12)
    throw EnumerationLimit("exhaustive_policy_ee: N*b exceeds 12", 12);

  std::vector<std::vector<Position>> paths;
  std::size_t horizon = 0;
  for (std::size_t r = 0; r < k; ++r) {
    paths.push_back(shortest_path(cfg, r));
    horizon = std::max(horizon, paths.back().size());
  }
  if (horizon > static_cast<std::size_t>(cfg.deadline))
    throw ConfigError("exhaustive_policy_ee: shortest path exceeds the deadline");

  const std::size_t ris_count = std::size_t{1} << (n * static_cast<std::size_t>(cfg.ris_bits));
  const double noise = cfg.link.noise_watts();
  const double dt = cfg.decision_interval;
  const double budget = cfg.budget_watts();

  // Candidate (bits, energy) pairs per step.
  std::vector<std::vector<std::pair<double, double>>> candidates;
  Rng rng(channel_seed);
  Topology topo = cfg.topology;
  for (std::size_t t = 0; t < horizon; ++t) {
    std::vector<std::size_t> active;
    for (std::size_t r = 0; r < k; ++r) {
      const bool on_path = t < paths[r].size();
      topo.devices[r] = on_path ? paths[r][t] : cfg.destinations[r];
      if (on_path) active.push_back(r);
    }
    const auto channels = sample_channels(rng, topo, cfg.link, 0);
    const auto orders = all_orders(active.size());
    const auto combos = power_combos(cfg.power_levels, active.size(), budget);
    const double fixed_energy =
        static_cast<double>(active.size()) * (cfg.motion_power + cfg.circuit_power) * dt;
    std::vector<std::pair<double, double>> step_candidates;
    for (std::size_t c = 0; c < ris_count; ++c) {
      std::vector<int> idx(n);
      std::size_t rest = c;
      for (std::size_t e = n; e-- > 0;) {
        idx[e] = static_cast<int>(rest % (std::size_t{1} << cfg.ris_bits));
        rest >>= cfg.ris_bits;
      }
      const RisConfig ris = config_from_indices(idx, cfg.ris_bits);
      std::vector<double> gains;
      for (std::size_t r : active)
        gains.push_back(effective_channel(channels[r], ris).squaredNorm() /
                        static_cast<double>(channels[r].antennas()));
      for (const auto& p : combos) {
        const double rate = best_rate_sum(gains, p, noise, cfg.access_mode, orders);
        const double energy = fixed_energy + std::accumulate(p.begin(), p.end(), 0.0) * dt;
        step_candidates.emplace_back(rate * dt, energy);
      }
    }
    candidates.push_back(std::move(step_candidates));
  }

  // Dinkelbach: lambda <- B(x*)/E(x*), x* = argmax B - lambda E, exact per step.
  double lambda = 0.0;
  for (int iter = 0; iter < 200; ++iter) {
    double bits = 0.0;
    double energy = 0.0;
    for (const auto& step : candidates) {
      if (step.empty()) continue;
      const auto* best = &step.front();
      for (const auto& c : step)
        if (c.first - lambda * c.second > best->first - lambda * best->second) best = &c;
      bits += best->first;
      energy += best->second;
    }
    if (!(energy > 0.0)) return 0.0;
    const double next = bits / energy;
    if (next <= lambda) break;
    lambda = next;
  }
  return lambda;
}

}  // namespace risiort::case1
