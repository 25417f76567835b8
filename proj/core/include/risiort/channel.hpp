#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "risiort/geometry.hpp"
#include "risiort/random.hpp"
#include "risiort/ris_config.hpp"

namespace risiort {

enum class LinkClass : int { kBsDevice = 0, kBsRis = 1, kRisDevice = 2 };

// Path-loss distance floor (m).
inline constexpr double kMinDistance = 0.5;

// K at or above this is treated as the pure-LoS limit.
inline constexpr double kRicianLosLimit = 1e6;

struct LinkParams {
  double ref_loss_db = 30.0;                 // dB at 1 m
  std::array<double, 3> exponent{3.5, 2.2, 2.2};  // indexed by LinkClass
  std::array<double, 3> rician_k{0.0, 10.0, 10.0};
  double noise_power_dbm = -80.0;
  // Extra attenuation applied to links that obstacles block (dB).
  double blockage_loss_db = 0.0;

  double exponent_of(LinkClass c) const { return exponent[static_cast<int>(c)]; }
  double rician_k_of(LinkClass c) const { return rician_k[static_cast<int>(c)]; }
  double noise_watts() const { return dbm_to_watts(noise_power_dbm); }
};

void validate_link_params(const LinkParams& lp);

// Linear power gain 10^(-(PL0 + 10 n log10 d)/10) with d clamped to kMinDistance.
double path_loss(double d, const LinkParams& lp, LinkClass cls);

// Large-scale statistics of one channel block: every entry has mean `los`
// (stored separately) and scattered variance power / (K + 1).
struct BlockStats {
  double power = 0.0;     // large-scale power gain per entry
  double rician_k = 0.0;  // 0 for blocked / Rayleigh links

  double scatter_variance() const;
  double los_amplitude() const;
};

// Channel blocks of one BS <-> device link through one RIS. All entries are
// linear amplitude gains. Convention: h_eff = h_direct + g_bs_ris^H diag(e^{j theta}) h_ris_dev.
struct ChannelSet {
  Eigen::VectorXcd h_direct;   // BS antennas
  Eigen::MatrixXcd g_bs_ris;   // N x BS antennas
  Eigen::VectorXcd h_ris_dev;  // N

  // Deterministic LoS means of each block (zero for Rayleigh blocks).
  Eigen::VectorXcd los_direct;
  Eigen::MatrixXcd los_bs_ris;
  Eigen::VectorXcd los_ris_dev;

  BlockStats direct_stats;
  BlockStats bs_ris_stats;
  BlockStats ris_dev_stats;

  Eigen::Index antennas() const { return h_direct.size(); }
  Eigen::Index elements() const { return h_ris_dev.size(); }
};

struct AgingParams {
  double rho = 1.0;           // temporal correlation, [0, 1]
  double velocity_mps = 0.0;  // informational only
};

struct CsiModel {
  double error_variance = 0.0;
  // When true the variance is relative to each block's large-scale power.
  bool relative = false;
};

// Half-wavelength ULA response e^{j pi i s}, i = 0..n-1, s = sin(angle).
Eigen::VectorXcd ula_response(Eigen::Index n, double sin_angle);

// Sine of the angle between the link direction and the array broadside;
// arrays lie along the x axis.
double ula_sine(const Position& from, const Position& to);

ChannelSet sample_channel(Rng& rng, const Topology& t, const LinkParams& lp, std::size_t bs,
                          std::size_t device);

// One ChannelSet per device for the given BS; the BS->RIS block is drawn once
// and shared by every returned set.
std::vector<ChannelSet> sample_channels(Rng& rng, const Topology& t, const LinkParams& lp,
                                        std::size_t bs);

Eigen::VectorXcd effective_channel(const ChannelSet& cs, const RisConfig& ris);
// Same, with the reflection coefficients e^{j theta_n} already formed.
Eigen::VectorXcd effective_channel(const ChannelSet& cs, const Eigen::VectorXcd& reflection);

Eigen::VectorXcd reflection_vector(const RisConfig& ris);

// First-order Gauss-Markov step of the scattered component:
// h' = rho h + (1 - rho) los + sqrt(1 - rho^2) e, e ~ CN(0, scatter variance).
// For Rayleigh blocks this is h' = rho h + sqrt(1 - rho^2) e with e ~ CN(0, power).
ChannelSet age_channel(Rng& rng, const ChannelSet& cs, const AgingParams& ap);
// Ages a group produced by sample_channels, keeping the shared block shared.
void age_channels(Rng& rng, std::vector<ChannelSet>& group, const AgingParams& ap);

// h_hat = h + e, e ~ CN(0, error_variance) i.i.d. per entry.
ChannelSet estimate_csi(Rng& rng, const ChannelSet& cs, const CsiModel& cm);
std::vector<ChannelSet> estimate_csis(Rng& rng, const std::vector<ChannelSet>& group,
                                      const CsiModel& cm);

}  // namespace risiort
