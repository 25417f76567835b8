#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "risiort/channel.hpp"
#include "risiort/geometry.hpp"
#include "risiort/random.hpp"
#include "risiort/ris_config.hpp"

// Coordinated multi-BS ISAC beamforming: coherent joint transmission of the
// user streams, per-BS sensing streams, and transmit beampattern shaping.
namespace risiort::isac {

struct IsacConfig {
  int bs_count = 1;
  int antennas = 4;  // per BS
  int users = 1;
  std::vector<double> target_angles;  // rad, common angular frame
  // user_channels[k][m]: effective channel from BS m to user k (antennas).
  std::vector<std::vector<Eigen::VectorXcd>> user_channels;
  std::vector<double> angle_grid;      // rad
  std::vector<double> desired_pattern; // one value per grid point
  double power_budget_dbm = 25.0;      // per BS
  double noise_power_dbm = -80.0;

  int streams() const { return users + sensing_streams(); }
  int sensing_streams() const { return antennas - users > 1 ? antennas - users : 1; }
  double budget_watts() const { return dbm_to_watts(power_budget_dbm); }
  double noise_watts() const { return dbm_to_watts(noise_power_dbm); }
};

void validate_config(const IsacConfig& cfg);

// 1 degree grid over [-90, 90] degrees.
std::vector<double> default_angle_grid();
// 1 inside +-halfwidth of any target angle, 0 elsewhere.
std::vector<double> mainlobe_pattern(const std::vector<double>& grid,
                                     const std::vector<double>& targets, double halfwidth);

// Builds a config whose user channels come from the topology (devices are
// the users, every BS serves every user through the RIS configured by `ris`).
IsacConfig config_from_topology(Rng& rng, const Topology& t, const LinkParams& lp,
                                const RisConfig& ris, const std::vector<double>& target_angles,
                                double power_budget_dbm);

// Per-BS precoders, antennas x (users + sensing streams).
using BeamformerSet = std::vector<Eigen::MatrixXcd>;

struct ObjectivePair {
  double sum_rate = 0.0;       // bits/s/Hz
  double pattern_error = 0.0;  // >= 0

  friend bool operator==(const ObjectivePair&, const ObjectivePair&) = default;
};

Eigen::VectorXcd steering_vector(double angle, int antennas);

double sum_rate(const IsacConfig& cfg, const BeamformerSet& w);
std::vector<double> beampattern(const IsacConfig& cfg, const BeamformerSet& w);
// (1/G) sum_g (alpha d_g - P_g)^2 with the least-squares alpha.
double beampattern_error(const IsacConfig& cfg, const BeamformerSet& w);
ObjectivePair evaluate(const IsacConfig& cfg, const BeamformerSet& w);

// Real gradients in complex form, dRe + j dIm, one matrix per BS.
BeamformerSet sum_rate_gradient(const IsacConfig& cfg, const BeamformerSet& w);
BeamformerSet beampattern_error_gradient(const IsacConfig& cfg, const BeamformerSet& w);

struct Weights {
  double rate = 0.5;
  double error = 0.5;
};

struct Reference {
  double ideal_rate = 0.0;
  double ideal_error = 0.0;
  double norm_rate = 1.0;
  double norm_error = 1.0;
};

// max(w_r (z_r - rate)/n_r, w_e (err - z_e)/n_e); smaller is better.
double tchebycheff_scalarize(const ObjectivePair& f, const Weights& w, const Reference& ref);

struct SolverParams {
  double step_size = 0.1;    // first step, as a fraction of the full-power norm
  int iterations = 300;
  int restarts = 5;
  double temperature = 0.01; // log-sum-exp smoothing of the max
};

bool feasible(const IsacConfig& cfg, const BeamformerSet& w, double rel_tol = 1e-9);
// Rescales every BS whose Frobenius norm^2 exceeds the budget onto it.
void project(const IsacConfig& cfg, BeamformerSet& w);
BeamformerSet zero_beamformers(const IsacConfig& cfg);
// Complex Gaussian direction scaled to the full per-BS budget.
BeamformerSet random_beamformers(Rng& rng, const IsacConfig& cfg);

struct Solution {
  BeamformerSet w;
  ObjectivePair objectives;
  double scalarized = 0.0;
};

Solution maximize_sum_rate(Rng& rng, const IsacConfig& cfg, const SolverParams& sp);
Solution minimize_pattern_error(Rng& rng, const IsacConfig& cfg, const SolverParams& sp);

struct IdealPoint {
  Reference reference;
  Solution rate_extreme;
  Solution error_extreme;
};

// Runs the two single-objective extremes; norms are the objective spreads.
IdealPoint ideal_point(Rng& rng, const IsacConfig& cfg, const SolverParams& sp);

// Projected descent on the smoothed scalarization; restarts from the two
// extremes plus `restarts` random full-power points. Never infeasible.
Solution solve_scalarized(Rng& rng, const IsacConfig& cfg, const Weights& weights,
                          const SolverParams& sp, const IdealPoint& ideal);
Solution solve_scalarized(Rng& rng, const IsacConfig& cfg, const Weights& weights,
                          const SolverParams& sp);

struct SweepEntry {
  Weights weights;
  Solution solution;
};

// Solves every weight with its own derived generator (merge order = weight
// index) and returns the raw entries.
std::vector<SweepEntry> sweep(Rng& rng, const IsacConfig& cfg, const std::vector<Weights>& weights,
                              const SolverParams& sp, const IdealPoint& ideal);

// Non-dominated objective pairs of a sweep, ascending by sum rate.
std::vector<ObjectivePair> pareto_sweep(Rng& rng, const IsacConfig& cfg,
                                        const std::vector<Weights>& weights,
                                        const SolverParams& sp);
std::vector<ObjectivePair> pareto_front(const std::vector<SweepEntry>& entries);

// w_r = i/(n-1), i = 0..n-1.
std::vector<Weights> uniform_weights(int n);

bool dominates(const ObjectivePair& a, const ObjectivePair& b);
// Keeps p iff nothing dominates it; exact duplicates kept once; stable.
std::vector<ObjectivePair> non_dominated_filter(const std::vector<ObjectivePair>& points);

// Uncoordinated baseline: each BS solves its own single-BS problem (own
// channels, own reference) and the designs are then used jointly.
BeamformerSet solve_independent(Rng& rng, const IsacConfig& cfg, const Weights& weights,
                                const SolverParams& sp);

}  // namespace risiort::isac
