#include "risiort/aircomp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "risiort/error.hpp"
#include "risiort/ris.hpp"

namespace risiort::aircomp {

namespace {

bool all_finite(const Eigen::VectorXcd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (!std::isfinite(v(i).real()) || !std::isfinite(v(i).imag())) return false;
  return true;
}

std::vector<Eigen::VectorXcd> effective_all(const std::vector<ChannelSet>& sets,
                                            const RisConfig& ris) {
  std::vector<Eigen::VectorXcd> out;
  out.reserve(sets.size());
  for (const auto& cs : sets) out.push_back(effective_channel(cs, ris));
  return out;
}

void push_block(std::vector<double>& out, const Eigen::MatrixXcd& m, const BlockStats& s) {
  const double inv = s.power > 0.0 ? 1.0 / std::sqrt(s.power) : 0.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      out.push_back(m(i, j).real() * inv);
      out.push_back(m(i, j).imag() * inv);
    }
}

Eigen::VectorXcd normalized(const Eigen::VectorXcd& v) {
  const double n = v.norm();
  return n > 0.0 ? Eigen::VectorXcd(v / n) : Eigen::VectorXcd(v);
}

// Unit-norm combination (1-t) u + t v with v rotated onto u.
Eigen::VectorXcd blend(const Eigen::VectorXcd& u, const Eigen::VectorXcd& v, double t) {
  const cd inner = u.dot(v);
  const cd rot = std::abs(inner) > 0.0 ? std::conj(inner) / std::abs(inner) : cd{1.0, 0.0};
  return normalized((1.0 - t) * u + t * rot * v);
}

}  // namespace

void validate_config(const Case3Config& cfg) {
  validate_topology(cfg.topology);
  validate_link_params(cfg.link);
  if (cfg.robots() < 1) throw ConfigError("case3: at least one robot required");
  if (!(cfg.tau_dl > 0.0) || !(cfg.tau_ul > 0.0)) throw ConfigError("case3: tau_dl, tau_ul must be > 0");
  if (!(cfg.eh_efficiency > 0.0 && cfg.eh_efficiency <= 1.0))
    throw ConfigError("case3.eh_efficiency must lie in (0, 1]");
  if (!(cfg.aging.rho >= 0.0 && cfg.aging.rho <= 1.0)) throw ConfigError("case3.rho must lie in [0, 1]");
  if (!(cfg.csi.error_variance >= 0.0)) throw ConfigError("case3.csi_error_variance must be >= 0");
  if (!(cfg.bs_power_budget > 0.0)) throw ConfigError("case3.bs_power_budget must be > 0");
  if (!(cfg.penalty_weight >= 0.0)) throw ConfigError("case3.penalty_weight must be >= 0");
  if (cfg.episode_length < 1) throw ConfigError("case3.episode_length must be >= 1");
}

std::vector<double> harvested_energy(const Eigen::VectorXcd& w_dl,
                                     const std::vector<Eigen::VectorXcd>& dl_channels,
                                     double zeta, double tau_d) {
  std::vector<double> e;
  e.reserve(dl_channels.size());
  for (const auto& g : dl_channels) {
    require(g.size() == w_dl.size(), "harvested_energy: beam/channel dimension mismatch");
    e.push_back(zeta * tau_d * std::norm(g.dot(w_dl)));
  }
  return e;
}

double aircomp_mse(const std::vector<Eigen::VectorXcd>& ul_channels, const Eigen::VectorXcd& b,
                   const Eigen::VectorXcd& a, double eta, double noise) {
  require(eta > 0.0, "aircomp_mse: eta must be > 0");
  require(static_cast<Eigen::Index>(ul_channels.size()) == b.size(),
          "aircomp_mse: one transmit scalar per robot required");
  const double inv_sqrt_eta = 1.0 / std::sqrt(eta);
  double mse = 0.0;
  for (std::size_t k = 0; k < ul_channels.size(); ++k) {
    require(ul_channels[k].size() == a.size(), "aircomp_mse: combiner/channel dimension mismatch");
    const cd align = a.dot(ul_channels[k]) * b(static_cast<Eigen::Index>(k)) * inv_sqrt_eta;
    mse += std::norm(align - 1.0);
  }
  return mse + noise * a.squaredNorm() / eta;
}

AirCompEnv::AirCompEnv(Case3Config cfg, std::uint64_t seed) : cfg_(std::move(cfg)), rng_(seed) {
  validate_config(cfg_);
}

EnvState AirCompEnv::reset() {
  channels_ = sample_channels(rng_, cfg_.topology, cfg_.link, 0);
  state_.previous_mse = static_cast<double>(cfg_.robots());  // MSE of a silent frame
  state_.estimated_csi = estimate_csis(rng_, channels_, cfg_.csi);
  elapsed_ = 0;
  done_ = false;
  return state_;
}

StepOutcome AirCompEnv::step(const AgentActions& actions) {
  require(!done_, "AirCompEnv::step: episode is finished; call reset()");
  const auto& a1 = actions.agent1;
  const auto& a2 = actions.agent2;
  const auto k = static_cast<Eigen::Index>(cfg_.robots());
  require(a2.w_dl.size() == cfg_.antennas() && a2.a.size() == cfg_.antennas() && a2.b.size() == k,
          "AirCompEnv::step: action dimensions do not match the configuration");
  require(all_finite(a2.w_dl) && all_finite(a2.b) && all_finite(a2.a) && std::isfinite(a2.eta),
          "AirCompEnv::step: non-finite action entries");
  require(a2.eta > 0.0, "AirCompEnv::step: eta must be > 0");
  for (double p : a1.ris_dl.phases) require(std::isfinite(p), "AirCompEnv::step: non-finite RIS phase");
  for (double p : a1.ris_ul.phases) require(std::isfinite(p), "AirCompEnv::step: non-finite RIS phase");

  age_channels(rng_, channels_, cfg_.aging);

  StepOutcome out;
  double violation = 0.0;

  Eigen::VectorXcd w = a2.w_dl;
  const double wp = w.squaredNorm();
  if (wp > cfg_.bs_power_budget) {
    violation += wp - cfg_.bs_power_budget;
    w *= std::sqrt(cfg_.bs_power_budget / wp);
  }
  out.harvested = harvested_energy(w, effective_all(channels_, a1.ris_dl), cfg_.eh_efficiency,
                                   cfg_.tau_dl);

  out.b_applied = a2.b;
  for (Eigen::Index i = 0; i < k; ++i) {
    const double limit = out.harvested[static_cast<std::size_t>(i)] / cfg_.tau_ul;
    const double p = std::norm(a2.b(i));
    if (p > limit) {
      violation += p - limit;
      out.b_applied(i) = limit > 0.0 ? a2.b(i) * std::sqrt(limit / p) : cd{};
    }
  }

  out.mse = aircomp_mse(effective_all(channels_, a1.ris_ul), out.b_applied, a2.a, a2.eta,
                        cfg_.noise_watts());
  out.penalty = violation;
  out.reward = violation > 0.0 ? -out.mse - cfg_.penalty_weight * violation : -out.mse;

  state_.previous_mse = out.mse;
  state_.estimated_csi = estimate_csis(rng_, channels_, cfg_.csi);
  ++elapsed_;
  done_ = elapsed_ >= cfg_.episode_length;
  out.done = done_;
  out.state = state_;
  return out;
}

std::size_t AirCompEnv::observation_dim() const {
  const auto k = cfg_.robots();
  const auto m = static_cast<std::size_t>(cfg_.antennas());
  const auto n = static_cast<std::size_t>(cfg_.elements());
  return 1 + 2 * (n * m + k * (m + n));
}

std::vector<double> AirCompEnv::observation() const {
  std::vector<double> obs;
  obs.reserve(observation_dim());
  const double k = static_cast<double>(cfg_.robots());
  obs.push_back(std::min(state_.previous_mse, 10.0 * k) / k);
  const auto& est = state_.estimated_csi;
  if (est.empty()) {
    obs.resize(observation_dim(), 0.0);
    return obs;
  }
  push_block(obs, est.front().g_bs_ris, est.front().bs_ris_stats);
  for (const auto& cs : est) {
    push_block(obs, cs.h_direct, cs.direct_stats);
    push_block(obs, cs.h_ris_dev, cs.ris_dev_stats);
  }
  return obs;
}

ActionScales AirCompEnv::scales() const {
  ActionScales s;
  s.w_norm = std::sqrt(cfg_.bs_power_budget);
  const Topology& t = cfg_.topology;
  const Position bs = t.bs_list.front().position;
  const double m = static_cast<double>(cfg_.antennas());
  const double n = static_cast<double>(cfg_.elements());
  const double pl_g = path_loss(distance(bs, t.ris.position), cfg_.link, LinkClass::kBsRis);
  double eta = std::numeric_limits<double>::infinity();
  for (const auto& dev : t.devices) {
    double pl_d = path_loss(distance(bs, dev), cfg_.link, LinkClass::kBsDevice);
    if (t.blockage.direct && los_blocked(t, bs, dev))
      pl_d *= std::pow(10.0, -cfg_.link.blockage_loss_db / 10.0);
    const double pl_r = path_loss(distance(t.ris.position, dev), cfg_.link, LinkClass::kRisDevice);
    const double amp = std::sqrt(pl_d) + n * std::sqrt(pl_g * pl_r);
    const double gain = m * amp * amp;  // coherent upper bound of ||h_eff||^2
    const double e_max = cfg_.eh_efficiency * cfg_.tau_dl * cfg_.bs_power_budget * gain;
    const double b_max = std::sqrt(e_max / cfg_.tau_ul);
    s.b_max.push_back(b_max);
    eta = std::min(eta, gain * b_max * b_max);
  }
  s.eta_ref = eta;
  return s;
}

OracleResult grid_oracle_mse(const Case3Config& cfg, const std::vector<ChannelSet>& frozen,
                             int grid_resolution) {
  const std::size_t k = frozen.size();
  require(grid_resolution >= 1, "grid_oracle_mse: grid resolution must be >= 1");
  require(k == cfg.robots(), "grid_oracle_mse: one channel set per robot required");
  if (k > 2 || cfg.elements() > 4)
    throw EnumerationLimit("grid_oracle_mse: search space guard requires K <= 2 and N <= 4", 2 * 4);
  if (grid_resolution > 64)
    throw EnumerationLimit("grid_oracle_mse: grid resolution above 64 refused", 64);

  const auto n = static_cast<std::size_t>(cfg.elements());
  const std::size_t configs = std::size_t{1} << n;
  const double noise = cfg.noise_watts();
  const int r = grid_resolution;

  auto ris_of = [&](std::size_t code) {
    std::vector<int> idx(n);
    for (std::size_t e = 0; e < n; ++e) idx[e] = static_cast<int>((code >> (n - 1 - e)) & 1U);
    return config_from_indices(idx, 1);
  };

  // Downlink candidates: per (ris_dl, blend) the uplink power ceilings.
  struct Downlink {
    RisConfig ris;
    Eigen::VectorXcd w;
    std::vector<double> p_max;
  };
  std::vector<Downlink> downlinks;
  for (std::size_t c = 0; c < configs; ++c) {
    const RisConfig ris = ris_of(c);
    const auto g = effective_all(frozen, ris);
    const int blends = k == 2 ? r : 0;
    for (int i = 0; i <= blends; ++i) {
      const Eigen::VectorXcd dir =
          k == 2 ? blend(normalized(g[0]), normalized(g[1]), static_cast<double>(i) / r)
                 : normalized(g[0]);
      if (dir.norm() == 0.0) continue;
      Downlink d{ris, std::sqrt(cfg.bs_power_budget) * dir, {}};
      for (double e : harvested_energy(d.w, g, cfg.eh_efficiency, cfg.tau_dl))
        d.p_max.push_back(e / cfg.tau_ul);
      downlinks.push_back(std::move(d));
    }
  }

  OracleResult best;
  best.mse = std::numeric_limits<double>::infinity();
  const int eta_points = 4 * r + 1;

  for (std::size_t c = 0; c < configs; ++c) {
    const RisConfig ris_ul = ris_of(c);
    const auto h = effective_all(frozen, ris_ul);
    const int blends = k == 2 ? r : 0;
    for (int j = 0; j <= blends; ++j) {
      const Eigen::VectorXcd a =
          k == 2 ? blend(normalized(h[0]), normalized(h[1]), static_cast<double>(j) / r)
                 : normalized(h[0]);
      if (a.norm() == 0.0) continue;
      std::vector<cd> gain(k);
      for (std::size_t i = 0; i < k; ++i) gain[i] = a.dot(h[i]);

      for (const auto& dl : downlinks) {
        std::vector<double> s(k);
        for (std::size_t i = 0; i < k; ++i) s[i] = std::sqrt(dl.p_max[i]) * std::abs(gain[i]);
        const double s2_min = std::min(s.front() * s.front(), s.back() * s.back());
        const double s2_max = std::max(s.front() * s.front(), s.back() * s.back());
        if (!(s2_min > 0.0)) continue;

        std::vector<double> etas{s2_min, s2_max};
        const double lo = std::log(s2_min);
        const double hi = std::log(100.0 * s2_max);
        for (int q = 0; q < eta_points; ++q)
          etas.push_back(std::exp(lo + (hi - lo) * q / (eta_points - 1)));

        for (double eta : etas) {
          double mse = noise / eta;  // ||a|| = 1
          for (std::size_t i = 0; i < k; ++i) {
            const double c_k = std::min(1.0, s[i] / std::sqrt(eta));
            mse += (1.0 - c_k) * (1.0 - c_k);
          }
          if (mse < best.mse) {
            best.mse = mse;
            AgentActions act;
            act.agent1 = {dl.ris, ris_ul};
            act.agent2.w_dl = dl.w;
            act.agent2.a = a;
            act.agent2.eta = eta;
            act.agent2.b.resize(static_cast<Eigen::Index>(k));
            for (std::size_t i = 0; i < k; ++i) {
              const double mag = std::abs(gain[i]);
              const double amp = std::sqrt(std::min(dl.p_max[i], eta / (mag * mag)));
              act.agent2.b(static_cast<Eigen::Index>(i)) = std::polar(amp, -std::arg(gain[i]));
            }
            best.actions = std::move(act);
          }
        }
      }
    }
  }
  if (!std::isfinite(best.mse))
    throw ContractViolation("grid_oracle_mse: no candidate with non-zero received power");
  return best;
}

}  // namespace risiort::aircomp
