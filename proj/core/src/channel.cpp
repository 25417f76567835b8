#include "risiort/channel.hpp"

#include <cmath>
#include <string>

#include "risiort/error.hpp"

namespace risiort {

void validate_link_params(const LinkParams& lp) {
  for (int c = 0; c < 3; ++c) {
    if (!(lp.exponent[c] > 0.0))
      throw ConfigError("link.exponent[" + std::to_string(c) + "] must be > 0");
    if (!(lp.rician_k[c] >= 0.0))
      throw ConfigError("link.rician_k[" + std::to_string(c) + "] must be >= 0");
  }
  if (!std::isfinite(lp.ref_loss_db)) throw ConfigError("link.ref_loss_db must be finite");
  if (!std::isfinite(lp.noise_power_dbm)) throw ConfigError("link.noise_power_dbm must be finite");
  if (!(lp.blockage_loss_db >= 0.0)) throw ConfigError("link.blockage_loss_db must be >= 0");
}

double path_loss(double d, const LinkParams& lp, LinkClass cls) {
  const double dc = std::max(d, kMinDistance);
  const double loss_db = lp.ref_loss_db + 10.0 * lp.exponent_of(cls) * std::log10(dc);
  return std::pow(10.0, -loss_db / 10.0);
}

double BlockStats::scatter_variance() const {
  if (rician_k >= kRicianLosLimit) return 0.0;
  return power / (rician_k + 1.0);
}

double BlockStats::los_amplitude() const {
  if (rician_k >= kRicianLosLimit) return std::sqrt(power);
  return std::sqrt(power * rician_k / (rician_k + 1.0));
}

Eigen::VectorXcd ula_response(Eigen::Index n, double sin_angle) {
  Eigen::VectorXcd a(n);
  for (Eigen::Index i = 0; i < n; ++i)
    a(i) = std::polar(1.0, kPi * static_cast<double>(i) * sin_angle);
  return a;
}

double ula_sine(const Position& from, const Position& to) {
  const double d = distance(from, to);
  if (d == 0.0) return 0.0;
  return (to.x - from.x) / d;
}

namespace {

BlockStats link_stats(const Topology& t, const LinkParams& lp, LinkClass cls, const Position& a,
                      const Position& b, bool blockable) {
  BlockStats s;
  s.power = path_loss(distance(a, b), lp, cls);
  s.rician_k = lp.rician_k_of(cls);
  if (blockable && los_blocked(t, a, b)) {
    s.power *= std::pow(10.0, -lp.blockage_loss_db / 10.0);
    s.rician_k = 0.0;
  }
  return s;
}

template <typename Mat>
Mat draw_block(Rng& rng, const Mat& los, const BlockStats& stats) {
  Mat out = los;
  const double var = stats.scatter_variance();
  if (var == 0.0) return out;
  for (Eigen::Index j = 0; j < out.cols(); ++j)
    for (Eigen::Index i = 0; i < out.rows(); ++i) out(i, j) += complex_normal(rng, var);
  return out;
}

void check_indices(const Topology& t, std::size_t bs, std::size_t device) {
  if (bs >= t.bs_list.size()) throw ContractViolation("sample_channel: BS index out of range");
  if (device >= t.devices.size())
    throw ContractViolation("sample_channel: device index out of range");
}

struct SharedBsRis {
  Eigen::MatrixXcd g;
  Eigen::MatrixXcd los;
  BlockStats stats;
};

SharedBsRis sample_bs_ris(Rng& rng, const Topology& t, const LinkParams& lp, std::size_t bs) {
  const auto& station = t.bs_list[bs];
  const Eigen::Index m = station.antennas;
  const Eigen::Index n = t.ris.elements;
  SharedBsRis out;
  out.stats = link_stats(t, lp, LinkClass::kBsRis, station.position, t.ris.position,
                         t.blockage.bs_ris);
  const Eigen::VectorXcd a_ris = ula_response(n, ula_sine(t.ris.position, station.position));
  const Eigen::VectorXcd a_bs = ula_response(m, ula_sine(station.position, t.ris.position));
  out.los = out.stats.los_amplitude() * (a_ris * a_bs.adjoint());
  out.g = draw_block(rng, out.los, out.stats);
  return out;
}

ChannelSet sample_device_blocks(Rng& rng, const Topology& t, const LinkParams& lp,
                                std::size_t bs, std::size_t device, const SharedBsRis& shared) {
  const auto& station = t.bs_list[bs];
  const Position& dev = t.devices[device];
  const Eigen::Index m = station.antennas;
  const Eigen::Index n = t.ris.elements;

  ChannelSet cs;
  cs.direct_stats =
      link_stats(t, lp, LinkClass::kBsDevice, station.position, dev, t.blockage.direct);
  cs.ris_dev_stats =
      link_stats(t, lp, LinkClass::kRisDevice, t.ris.position, dev, t.blockage.ris_device);
  cs.bs_ris_stats = shared.stats;

  cs.los_direct =
      cs.direct_stats.los_amplitude() * ula_response(m, ula_sine(station.position, dev));
  cs.los_ris_dev =
      cs.ris_dev_stats.los_amplitude() * ula_response(n, ula_sine(t.ris.position, dev));
  cs.los_bs_ris = shared.los;

  cs.h_direct = draw_block(rng, cs.los_direct, cs.direct_stats);
  cs.g_bs_ris = shared.g;
  cs.h_ris_dev = draw_block(rng, cs.los_ris_dev, cs.ris_dev_stats);
  return cs;
}

template <typename Mat>
Mat age_block(Rng& rng, const Mat& h, const Mat& los, const BlockStats& stats, double rho) {
  const double innovation = std::sqrt(std::max(0.0, 1.0 - rho * rho));
  const double var = stats.scatter_variance();
  Mat out(h.rows(), h.cols());
  for (Eigen::Index j = 0; j < h.cols(); ++j)
    for (Eigen::Index i = 0; i < h.rows(); ++i) {
      const cd e = var > 0.0 ? complex_normal(rng, var) : cd{};
      out(i, j) = rho * h(i, j) + (1.0 - rho) * los(i, j) + innovation * e;
    }
  return out;
}

template <typename Mat>
Mat perturb_block(Rng& rng, const Mat& h, double variance) {
  Mat out = h;
  if (variance == 0.0) return out;
  for (Eigen::Index j = 0; j < h.cols(); ++j)
    for (Eigen::Index i = 0; i < h.rows(); ++i) out(i, j) += complex_normal(rng, variance);
  return out;
}

double csi_variance(const CsiModel& cm, const BlockStats& stats) {
  return cm.relative ? cm.error_variance * stats.power : cm.error_variance;
}

void check_rho(const AgingParams& ap) {
  if (!(ap.rho >= 0.0 && ap.rho <= 1.0)) throw ContractViolation("aging rho must lie in [0, 1]");
}

}  // namespace

ChannelSet sample_channel(Rng& rng, const Topology& t, const LinkParams& lp, std::size_t bs,
                          std::size_t device) {
  check_indices(t, bs, device);
  const SharedBsRis shared = sample_bs_ris(rng, t, lp, bs);
  return sample_device_blocks(rng, t, lp, bs, device, shared);
}

std::vector<ChannelSet> sample_channels(Rng& rng, const Topology& t, const LinkParams& lp,
                                        std::size_t bs) {
  if (bs >= t.bs_list.size()) throw ContractViolation("sample_channels: BS index out of range");
  const SharedBsRis shared = sample_bs_ris(rng, t, lp, bs);
  std::vector<ChannelSet> out;
  out.reserve(t.devices.size());
  for (std::size_t d = 0; d < t.devices.size(); ++d)
    out.push_back(sample_device_blocks(rng, t, lp, bs, d, shared));
  return out;
}

Eigen::VectorXcd reflection_vector(const RisConfig& ris) {
  Eigen::VectorXcd v(static_cast<Eigen::Index>(ris.phases.size()));
  for (std::size_t i = 0; i < ris.phases.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = std::polar(1.0, ris.phases[i]);
  return v;
}

Eigen::VectorXcd effective_channel(const ChannelSet& cs, const Eigen::VectorXcd& reflection) {
  if (reflection.size() != cs.elements() || cs.g_bs_ris.rows() != cs.elements() ||
      cs.g_bs_ris.cols() != cs.antennas())
    throw ContractViolation("effective_channel: RIS size does not match channel dimensions");
  return cs.h_direct + cs.g_bs_ris.adjoint() * reflection.cwiseProduct(cs.h_ris_dev);
}

Eigen::VectorXcd effective_channel(const ChannelSet& cs, const RisConfig& ris) {
  if (static_cast<Eigen::Index>(ris.element_count()) != cs.elements())
    throw ContractViolation("effective_channel: RIS element count does not match channel");
  return effective_channel(cs, reflection_vector(ris));
}

ChannelSet age_channel(Rng& rng, const ChannelSet& cs, const AgingParams& ap) {
  check_rho(ap);
  ChannelSet out = cs;
  out.h_direct = age_block(rng, cs.h_direct, cs.los_direct, cs.direct_stats, ap.rho);
  out.g_bs_ris = age_block(rng, cs.g_bs_ris, cs.los_bs_ris, cs.bs_ris_stats, ap.rho);
  out.h_ris_dev = age_block(rng, cs.h_ris_dev, cs.los_ris_dev, cs.ris_dev_stats, ap.rho);
  return out;
}

void age_channels(Rng& rng, std::vector<ChannelSet>& group, const AgingParams& ap) {
  check_rho(ap);
  if (group.empty()) return;
  const Eigen::MatrixXcd g =
      age_block(rng, group[0].g_bs_ris, group[0].los_bs_ris, group[0].bs_ris_stats, ap.rho);
  for (auto& cs : group) {
    cs.h_direct = age_block(rng, cs.h_direct, cs.los_direct, cs.direct_stats, ap.rho);
    cs.h_ris_dev = age_block(rng, cs.h_ris_dev, cs.los_ris_dev, cs.ris_dev_stats, ap.rho);
    cs.g_bs_ris = g;
  }
}

ChannelSet estimate_csi(Rng& rng, const ChannelSet& cs, const CsiModel& cm) {
  if (!(cm.error_variance >= 0.0)) throw ContractViolation("CSI error variance must be >= 0");
  ChannelSet out = cs;
  out.h_direct = perturb_block(rng, cs.h_direct, csi_variance(cm, cs.direct_stats));
  out.g_bs_ris = perturb_block(rng, cs.g_bs_ris, csi_variance(cm, cs.bs_ris_stats));
  out.h_ris_dev = perturb_block(rng, cs.h_ris_dev, csi_variance(cm, cs.ris_dev_stats));
  return out;
}

std::vector<ChannelSet> estimate_csis(Rng& rng, const std::vector<ChannelSet>& group,
                                      const CsiModel& cm) {
  if (!(cm.error_variance >= 0.0)) throw ContractViolation("CSI error variance must be >= 0");
  std::vector<ChannelSet> out = group;
  if (group.empty()) return out;
  const Eigen::MatrixXcd g =
      perturb_block(rng, group[0].g_bs_ris, csi_variance(cm, group[0].bs_ris_stats));
  for (auto& cs : out) {
    cs.h_direct = perturb_block(rng, cs.h_direct, csi_variance(cm, cs.direct_stats));
    cs.h_ris_dev = perturb_block(rng, cs.h_ris_dev, csi_variance(cm, cs.ris_dev_stats));
    cs.g_bs_ris = g;
  }
  return out;
}

}  // namespace risiort
