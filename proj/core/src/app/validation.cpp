#include "risiort/app/validation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>

#include "risiort/aircomp.hpp"
#include "risiort/case1.hpp"
#include "risiort/channel.hpp"
#include "risiort/error.hpp"
#include "risiort/isac.hpp"
#include "risiort/learn/ddpg.hpp"
#include "risiort/learn/dqn.hpp"
#include "risiort/learn/fedavg.hpp"
#include "risiort/learn/replay.hpp"
#include "risiort/learn/sac.hpp"
#include "risiort/ris.hpp"

namespace risiort::app {

namespace {

using Clock = std::chrono::steady_clock;

// Records a check whose observed value must not exceed the tolerance.
CheckResult at_most(const std::string& suite, const std::string& name, double observed,
                    double tolerance, const std::string& detail) {
  CheckResult c{suite, name, observed <= tolerance, observed, tolerance, tolerance - observed, 0.0, detail};
  return c;
}

// Records a check whose observed value must reach the tolerance.
CheckResult at_least(const std::string& suite, const std::string& name, double observed,
                     double tolerance, const std::string& detail) {
  CheckResult c{suite, name, observed >= tolerance, observed, tolerance, observed - tolerance, 0.0, detail};
  return c;
}

template <typename F>
void timed(std::vector<CheckResult>& out, F&& f) {
  const auto t0 = Clock::now();
  CheckResult c = f();
  c.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  out.push_back(std::move(c));
}

Topology small_topology(int antennas, int elements, std::size_t devices) {
  Topology t;
  t.bs_list = {{{0.0, 0.0, 3.0}, antennas}};
  t.ris = {{6.0, 8.0, 3.0}, elements};
  for (std::size_t k = 0; k < devices; ++k)
    t.devices.push_back({4.0 + 2.0 * static_cast<double>(k), 6.0, 0.0});
  return t;
}

// ---------------------------------------------------------------- channel

std::vector<CheckResult> channel_suite() {
  std::vector<CheckResult> out;
  const std::string s = "channel";
  timed(out, [&] {
    LinkParams lp;
    const double got = path_loss(1.0, lp, LinkClass::kBsRis);
    const double want = std::pow(10.0, -lp.ref_loss_db / 10.0);
    return at_most(s, "path_loss_reference_distance", std::abs(got - want) / want, 1e-12,
                   "relative deviation of path_loss(1 m) from 10^(-PL0/10)");
  });

  // Scalar Rayleigh link aged for 1e5 steps.
  Topology t = small_topology(1, 1, 1);
  LinkParams lp;
  Rng rng(7);
  ChannelSet cs = sample_channel(rng, t, lp, 0, 0);
  const double nominal = cs.direct_stats.power;
  const AgingParams ap{0.99, 1.0};
  const int steps = 100000;
  std::vector<cd> series;
  series.reserve(steps);
  for (int i = 0; i < steps; ++i) {
    cs = age_channel(rng, cs, ap);
    series.push_back(cs.h_direct(0));
  }
  double power = 0.0;
  cd lag{};
  for (int i = 0; i < steps; ++i) {
    power += std::norm(series[static_cast<std::size_t>(i)]);
    if (i > 0) lag += series[static_cast<std::size_t>(i)] * std::conj(series[static_cast<std::size_t>(i - 1)]);
  }
  const double rho_hat = lag.real() / power;
  timed(out, [&] {
    CheckResult c = at_least(s, "aging_lag1_autocorrelation", rho_hat, 0.98,
                             "empirical lag-1 autocorrelation at rho=0.99 over 1e5 steps, in [0.98, 1]");
    c.pass = c.pass && rho_hat <= 1.0;
    c.margin = std::min(rho_hat - 0.98, 1.0 - rho_hat);
    return c;
  });
  timed(out, [&] {
    const double drift = std::abs(power / steps / nominal - 1.0);
    return at_most(s, "aging_power_drift", drift, 0.03, "relative drift of mean power over 1e5 steps");
  });
  timed(out, [&] {
    Rng r(11);
    ChannelSet base = sample_channel(r, small_topology(4, 8, 1), lp, 0, 0);
    const CsiModel cm{1e-3 * base.bs_ris_stats.power, false};
    double acc = 0.0;
    const int draws = 2000;
    for (int i = 0; i < draws; ++i) acc += (estimate_csi(r, base, cm).g_bs_ris - base.g_bs_ris).squaredNorm();
    const double var = acc / (draws * static_cast<double>(base.g_bs_ris.size()));
    return at_most(s, "csi_error_variance", std::abs(var / cm.error_variance - 1.0), 0.05,
                   "relative deviation of the empirical estimation-error variance");
  });
  return out;
}

// ---------------------------------------------------------------- ris

std::vector<CheckResult> ris_suite() {
  std::vector<CheckResult> out;
  const std::string s = "ris";
  Rng rng(21);
  const ChannelSet cs = sample_channel(rng, small_topology(4, 8, 1), LinkParams{}, 0, 0);
  const RisObjective gain = [](const Eigen::VectorXcd& h) { return h.squaredNorm(); };
  RisSearchResult best;
  double seconds = 0.0;
  timed(out, [&] {
    const auto t0 = Clock::now();
    best = brute_force_best_config(cs, 2, gain);
    seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    return at_most(s, "brute_force_runtime_n8_b2", seconds, 60.0,
                   "seconds to enumerate 65536 configurations");
  });
  timed(out, [&] {
    double worst_gap = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 1000; ++i) {
      const RisConfig r = random_config(rng, 8, 2);
      worst_gap = std::min(worst_gap, best.objective - gain(effective_channel(cs, r)));
    }
    return at_least(s, "brute_force_vs_1000_random", worst_gap / best.objective, 0.0,
                    "smallest relative lead of the exhaustive optimum over random configurations");
  });
  timed(out, [&] {
    const RisConfig heuristic = quantize_phases(align_phases(cs), 2);
    const double h = gain(effective_channel(cs, heuristic));
    return at_least(s, "brute_force_vs_aligned_heuristic", (best.objective - h) / best.objective, 0.0,
                    "relative lead over the quantized per-element alignment");
  });
  timed(out, [&] {
    int mismatches = 0;
    for (int bits = 1; bits <= 4; ++bits)
      for (int k = 0; k < (1 << bits); ++k) {
        RisConfig c;
        c.phases = {codebook_phase(k, bits)};
        if (phase_indices(quantize_phases(c, bits)).front() != k) ++mismatches;
      }
    return at_most(s, "codebook_round_trip", mismatches, 0.0, "codebook points that fail to quantize onto themselves");
  });
  return out;
}

// ---------------------------------------------------------------- case1

case1::Case1Config tiny_case1() {
  case1::Case1Config c;
  c.topology = small_topology(2, 2, 2);
  c.topology.devices = {{0.5, 0.5, 0.0}, {2.5, 0.5, 0.0}};
  c.topology.ris = {{1.5, 3.0, 2.0}, 2};
  c.destinations = {{2.5, 2.5, 0.0}, {0.5, 2.5, 0.0}};
  c.area = case1::Area{{0.0, 0.0, 0.0}, {3.0, 3.0, 0.0}};
  c.ris_bits = 1;
  c.power_levels = {0.0, 0.005, 0.01};
  return c;
}

std::vector<CheckResult> case1_suite() {
  std::vector<CheckResult> out;
  const std::string s = "case1";
  timed(out, [&] {
    Rng rng(31);
    std::uniform_real_distribution<double> g(-12.0, -6.0);
    const std::vector<double> levels{0.0, 0.01, 0.05, 0.1};
    int wins = 0;
    double worst = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 100; ++i) {
      const std::vector<double> gains{std::pow(10.0, g(rng)), std::pow(10.0, g(rng))};
      const double noma = case1::exhaustive_max_ee(gains, levels, 1.0, 1e-11, 0.1, case1::AccessMode::kNoma);
      const double oma = case1::exhaustive_max_ee(gains, levels, 1.0, 1e-11, 0.1, case1::AccessMode::kOma);
      if (noma >= oma) ++wins;
      worst = std::min(worst, (noma - oma) / oma);
    }
    CheckResult c = at_least(s, "noma_ge_oma_exhaustive", wins, 100.0,
                             "instances (of 100) with max-EE(NOMA) >= max-EE(OMA)");
    c.detail += "; smallest relative lead " + std::to_string(worst);
    return c;
  });
  timed(out, [&] {
    case1::Case1Config c = tiny_case1();
    double prev = -1.0;
    double worst_step = std::numeric_limits<double>::infinity();
    for (double dbm : {10.0, 20.0, 30.0}) {
      c.max_power_dbm = dbm;
      const double ee = case1::exhaustive_policy_ee(c, 5);
      if (prev >= 0.0) worst_step = std::min(worst_step, ee - prev);
      prev = ee;
    }
    return at_least(s, "exhaustive_policy_ee_monotone_in_budget", worst_step, 0.0,
                    "smallest EE increase between budgets 10 -> 20 -> 30 dBm [bit/J]");
  });
  return out;
}

// ---------------------------------------------------------------- case2

isac::IsacConfig small_isac(std::uint64_t seed) {
  Rng rng(seed);
  Topology t;
  t.bs_list = {{{-10.0, 0.0, 5.0}, 4}, {{10.0, 0.0, 5.0}, 4}};
  t.ris = {{0.0, 10.0, 5.0}, 4};
  t.devices = {{-3.0, 12.0, 0.0}, {4.0, 14.0, 0.0}};
  RisConfig ris;
  ris.phases.assign(4, 0.0);
  const double pi = kPi;
  return isac::config_from_topology(rng, t, LinkParams{}, ris, {-pi / 6.0, pi / 5.0}, 25.0);
}

double isac_gradient_error(const isac::IsacConfig& cfg, Rng& rng, bool rate) {
  isac::BeamformerSet w = isac::random_beamformers(rng, cfg);
  for (auto& m : w) m *= 0.7;
  auto f = [&] { return rate ? isac::sum_rate(cfg, w) : isac::beampattern_error(cfg, w); };
  const isac::BeamformerSet g =
      rate ? isac::sum_rate_gradient(cfg, w) : isac::beampattern_error_gradient(cfg, w);
  std::vector<double*> params;
  std::vector<double> analytic;
  for (std::size_t m = 0; m < w.size(); ++m)
    for (Eigen::Index i = 0; i < w[m].size(); ++i) {
      auto* z = reinterpret_cast<double*>(w[m].data() + i);
      params.push_back(z);
      analytic.push_back(g[m].data()[i].real());
      params.push_back(z + 1);
      analytic.push_back(g[m].data()[i].imag());
    }
  // Step relative to the beamformer scale keeps the difference well conditioned.
  const double scale = std::sqrt(cfg.budget_watts());
  const double f0 = f();
  const double fscale = std::max(std::abs(f0), 1e-300);
  const double step = 1e-5 * scale;
  double worst = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double keep = *params[i];
    *params[i] = keep + step;
    const double up = f();
    *params[i] = keep - step;
    const double down = f();
    *params[i] = keep;
    const double numeric = (up - down) / (2.0 * step);
    // Compare in units of objective per unit beam scale.
    worst = std::max(worst, relative_error(analytic[i] * scale / fscale, numeric * scale / fscale));
  }
  return worst;
}

std::vector<CheckResult> case2_suite() {
  std::vector<CheckResult> out;
  const std::string s = "case2";
  timed(out, [&] {
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      Rng rng(seed + 100);
      worst = std::max(worst, isac_gradient_error(small_isac(seed), rng, true));
    }
    return at_most(s, "sum_rate_gradient_fd", worst, 1e-5, "max relative error vs central differences, 5 seeds");
  });
  timed(out, [&] {
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      Rng rng(seed + 200);
      worst = std::max(worst, isac_gradient_error(small_isac(seed), rng, false));
    }
    return at_most(s, "pattern_error_gradient_fd", worst, 1e-5, "max relative error vs central differences, 5 seeds");
  });
  timed(out, [&] {
    const auto cfg = small_isac(3);
    Rng rng(9);
    isac::SolverParams sp;
    sp.iterations = 150;
    sp.restarts = 2;
    const auto front = isac::pareto_sweep(rng, cfg, isac::uniform_weights(6), sp);
    int dominated = 0;
    for (const auto& a : front)
      for (const auto& b : front) dominated += isac::dominates(a, b) ? 1 : 0;
    return at_most(s, "pareto_front_mutually_non_dominated", dominated, 0.0,
                   "dominated pairs inside the returned front");
  });
  timed(out, [&] {
    const auto cfg = small_isac(4);
    Rng rng(10);
    isac::BeamformerSet w = isac::random_beamformers(rng, cfg);
    for (auto& m : w) m *= 3.0;
    isac::project(cfg, w);
    return at_least(s, "projection_feasible", isac::feasible(cfg, w) ? 1.0 : 0.0, 1.0,
                    "per-BS power budget holds after projection");
  });
  return out;
}

// ---------------------------------------------------------------- case3

aircomp::Case3Config small_case3(double noise_dbm) {
  aircomp::Case3Config c;
  c.topology.bs_list = {{{0.0, 0.0, 2.0}, 2}};
  c.topology.ris = {{4.0, 4.0, 2.0}, 2};
  c.topology.devices = {{3.0, 5.0, 0.0}, {5.0, 5.0, 0.0}};
  c.link.noise_power_dbm = noise_dbm;
  c.episode_length = 50;
  return c;
}

std::vector<CheckResult> case3_suite() {
  std::vector<CheckResult> out;
  const std::string s = "case3";
  timed(out, [&] {
    Rng rng(41);
    const int k = 2;
    const Eigen::Index m = 3;
    std::vector<Eigen::VectorXcd> h;
    for (int i = 0; i < k; ++i) h.push_back(complex_normal_vector(rng, m));
    const Eigen::VectorXcd a = complex_normal_vector(rng, m);
    const Eigen::VectorXcd b = complex_normal_vector(rng, k);
    const double eta = 2.0;
    const double noise = 0.05;
    const double analytic = aircomp::aircomp_mse(h, b, a, eta, noise);
    std::normal_distribution<double> nd(0.0, 1.0);
    const int draws = 200000;
    double acc = 0.0;
    for (int d = 0; d < draws; ++d) {
      cd y{};
      cd target{};
      for (int i = 0; i < k; ++i) {
        const cd sym(nd(rng) / std::sqrt(2.0), nd(rng) / std::sqrt(2.0));
        target += sym;
        y += a.dot(h[static_cast<std::size_t>(i)]) * b(i) * sym;
      }
      const Eigen::VectorXcd n = complex_normal_vector(rng, m, noise);
      y += a.dot(n);
      acc += std::norm(y / std::sqrt(eta) - target);
    }
    const double rel = std::abs(acc / draws - analytic) / analytic;
    return at_most(s, "mse_vs_monte_carlo", rel, 0.01, "relative gap over 2e5 symbol draws");
  });
  timed(out, [&] {
    const auto cfg = small_case3(-120.0);
    aircomp::AirCompEnv env(cfg, 3);
    env.reset();
    const auto oracle = aircomp::grid_oracle_mse(cfg, env.true_channels(), 8);
    Rng rng(5);
    double best_random = std::numeric_limits<double>::infinity();
    const double p = cfg.bs_power_budget;
    for (int i = 0; i < 1000; ++i) {
      aircomp::AgentActions act;
      act.agent1 = {random_config(rng, 2, 1), random_config(rng, 2, 1)};
      act.agent2.w_dl = complex_normal_vector(rng, 2).normalized() * std::sqrt(p);
      act.agent2.a = complex_normal_vector(rng, 2).normalized();
      const auto dl = std::vector<Eigen::VectorXcd>{effective_channel(env.true_channels()[0], act.agent1.ris_dl),
                                                    effective_channel(env.true_channels()[1], act.agent1.ris_dl)};
      const auto e = aircomp::harvested_energy(act.agent2.w_dl, dl, cfg.eh_efficiency, cfg.tau_dl);
      act.agent2.b.resize(2);
      for (int k = 0; k < 2; ++k)
        act.agent2.b(k) = std::polar(std::sqrt(e[static_cast<std::size_t>(k)] / cfg.tau_ul) * uniform01(rng),
                                     kTwoPi * uniform01(rng));
      act.agent2.eta = std::pow(10.0, -20.0 + 8.0 * uniform01(rng));
      std::vector<Eigen::VectorXcd> ul;
      for (const auto& cs : env.true_channels()) ul.push_back(effective_channel(cs, act.agent1.ris_ul));
      best_random = std::min(best_random,
                             aircomp::aircomp_mse(ul, act.agent2.b, act.agent2.a, act.agent2.eta, cfg.noise_watts()));
    }
    return at_least(s, "grid_oracle_vs_1000_random", best_random - oracle.mse, 0.0,
                    "lead of the grid oracle over the best of 1000 random feasible actions [MSE]");
  });
  timed(out, [&] {
    auto cfg = small_case3(-100.0);
    aircomp::AirCompEnv env(cfg, 8);
    env.reset();
    Rng rng(6);
    double worst = -std::numeric_limits<double>::infinity();
    while (!env.done()) {
      aircomp::AgentActions act;
      act.agent1 = {random_config(rng, 2, std::nullopt), random_config(rng, 2, std::nullopt)};
      act.agent2.w_dl = complex_normal_vector(rng, 2).normalized();
      act.agent2.a = complex_normal_vector(rng, 2);
      act.agent2.b = complex_normal_vector(rng, 2, 1e-6);
      act.agent2.eta = 1e-12;
      const auto o = env.step(act);
      for (int k = 0; k < 2; ++k)
        worst = std::max(worst, std::norm(o.b_applied(k)) * cfg.tau_ul - o.harvested[static_cast<std::size_t>(k)]);
    }
    return at_most(s, "energy_causality_after_clipping", worst, 1e-12,
                   "largest |b|^2 tau_u - E over an episode of oversized transmit requests [J]");
  });
  return out;
}

// ---------------------------------------------------------------- learn

std::vector<CheckResult> learn_suite() {
  std::vector<CheckResult> out;
  const std::string s = "learn";
  std::vector<HeadCheck> battery;
  const auto t0 = Clock::now();
  battery = gradient_battery(10);
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  std::vector<std::string> heads;
  for (const auto& h : battery)
    if (std::find(heads.begin(), heads.end(), h.head) == heads.end()) heads.push_back(h.head);
  for (const auto& name : heads) {
    double worst = 0.0;
    for (const auto& h : battery)
      if (h.head == name) worst = std::max(worst, h.max_relative_error);
    CheckResult c = at_most(s, "gradient_fd_" + name, worst, 1e-5,
                            "max relative error vs central differences (h=1e-5), 10 seeds");
    c.seconds = secs / static_cast<double>(heads.size());
    out.push_back(c);
  }
  timed(out, [&] {
    Rng rng(3);
    learn::Mlp online({4, 8, 2}, learn::OutputActivation::kLinear, rng);
    learn::Mlp target({4, 8, 2}, learn::OutputActivation::kLinear, rng);
    const learn::WeightSet before = target.weights();
    const double tau = 0.37;
    learn::soft_update(target, online, tau);
    int mismatches = 0;
    for (std::size_t l = 0; l < before.size(); ++l)
      for (Eigen::Index i = 0; i < before[l].w.size(); ++i) {
        const double want = (1.0 - tau) * before[l].w.data()[i] + tau * online.weights()[l].w.data()[i];
        if (target.weights()[l].w.data()[i] != want) ++mismatches;
      }
    return at_most(s, "soft_update_exact", mismatches, 0.0, "entries differing from (1-tau) old + tau online");
  });
  timed(out, [&] {
    learn::ReplayBuffer buf(10, 1, 1);
    for (int i = 0; i < 10; ++i)
      buf.push({Eigen::VectorXd::Constant(1, i), Eigen::VectorXd::Zero(1), 0.0, Eigen::VectorXd::Zero(1), false});
    Rng rng(4);
    std::vector<int> counts(10, 0);
    for (std::size_t idx : buf.sample_indices(rng, 100000)) ++counts[idx];
    double worst = 0.0;
    for (int c : counts) worst = std::max(worst, std::abs(c / 1e5 - 0.1));
    return at_most(s, "replay_sampling_uniform", worst, 0.01, "largest slot-frequency deviation from 0.1 over 1e5 draws");
  });
  timed(out, [&] {
    Rng rng(5);
    std::vector<learn::WeightSet> sets;
    for (int i = 0; i < 5; ++i) sets.push_back(learn::Mlp({3, 6, 2}, learn::OutputActivation::kLinear, rng).weights());
    const auto ref = learn::fed_avg(sets);
    int mismatches = 0;
    std::vector<learn::WeightSet> perm = sets;
    for (int trial = 0; trial < 20; ++trial) {
      std::shuffle(perm.begin(), perm.end(), rng);
      if (!(learn::fed_avg(perm) == ref)) ++mismatches;
    }
    return at_most(s, "fed_avg_permutation_invariant", mismatches, 0.0, "permutations changing the mean bitwise");
  });
  return out;
}

// Flattened parameter pointers and gradients in matching order.
void collect(learn::Mlp& net, const learn::WeightSet& g, std::vector<double*>& params,
             std::vector<double>& analytic) {
  auto& w = net.weights();
  for (std::size_t l = 0; l < w.size(); ++l) {
    for (Eigen::Index i = 0; i < w[l].w.size(); ++i) {
      params.push_back(w[l].w.data() + i);
      analytic.push_back(g[l].w.data()[i]);
    }
    for (Eigen::Index i = 0; i < w[l].b.size(); ++i) {
      params.push_back(w[l].b.data() + i);
      analytic.push_back(g[l].b.data()[i]);
    }
  }
}

Eigen::MatrixXd random_matrix(Rng& rng, Eigen::Index r, Eigen::Index c, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index j = 0; j < c; ++j)
    for (Eigen::Index i = 0; i < r; ++i) m(i, j) = u(rng);
  return m;
}

// Zero-initialized biases put ReLU pre-activations exactly on the kink
// whenever an upstream layer is fully inactive; checks run at generic points.
void jitter_biases(learn::Mlp& net, Rng& rng) {
  std::uniform_real_distribution<double> u(-0.1, 0.1);
  for (auto& l : net.weights())
    for (Eigen::Index i = 0; i < l.b.size(); ++i) l.b(i) = u(rng);
}

}  // namespace

double relative_error(double analytic, double numeric, double floor) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
}

double max_gradient_error(const std::function<double()>& loss, std::vector<double*> params,
                          const std::vector<double>& analytic, double h) {
  require(params.size() == analytic.size(), "max_gradient_error: one analytic entry per parameter");
  double worst = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double keep = *params[i];
    *params[i] = keep + h;
    const double up = loss();
    *params[i] = keep - h;
    const double down = loss();
    *params[i] = keep;
    worst = std::max(worst, relative_error(analytic[i], (up - down) / (2.0 * h), kGradientFloor));
  }
  return worst;
}

std::vector<HeadCheck> gradient_battery(int seeds) {
  std::vector<HeadCheck> out;
  const int batch = 4;
  for (int seed = 0; seed < seeds; ++seed) {
    Rng rng(derive_seed(0x6a7d, static_cast<std::uint64_t>(seed)));
    for (auto act : {learn::OutputActivation::kLinear, learn::OutputActivation::kTanh}) {
      learn::Mlp net({5, 7, 6, 3}, act, rng);
      jitter_biases(net, rng);
      const Eigen::MatrixXd x = random_matrix(rng, 5, batch);
      const Eigen::MatrixXd c = random_matrix(rng, 3, batch);
      learn::Mlp::Cache cache;
      net.forward(x, cache);
      const auto g = net.backward(cache, c);
      std::vector<double*> p;
      std::vector<double> a;
      collect(net, g.params, p, a);
      auto loss = [&] { return net.forward(x).cwiseProduct(c).sum(); };
      const std::string name = act == learn::OutputActivation::kTanh ? "mlp_tanh" : "mlp_linear";
      out.push_back({name, max_gradient_error(loss, p, a)});
      // Input gradient of the same head.
      Eigen::MatrixXd xv = x;
      std::vector<double*> px;
      std::vector<double> ax;
      for (Eigen::Index i = 0; i < xv.size(); ++i) {
        px.push_back(xv.data() + i);
        ax.push_back(g.dx.data()[i]);
      }
      auto loss_x = [&] { return net.forward(xv).cwiseProduct(c).sum(); };
      out.push_back({name + "_input", max_gradient_error(loss_x, px, ax)});
    }
    {
      learn::DqnAgent agent = learn::make_dqn(rng, 4, 5, {8, 6}, {}, 10);
      jitter_biases(agent.online, rng);
      learn::Batch b;
      b.states = random_matrix(rng, 4, batch);
      b.next_states = random_matrix(rng, 4, batch);
      b.actions.resize(1, batch);
      for (int j = 0; j < batch; ++j) b.actions(0, j) = j % 5;
      b.rewards = random_matrix(rng, batch, 1).col(0);
      b.done = Eigen::VectorXd::Zero(batch);
      const Eigen::VectorXd y = learn::dqn_targets(agent, b, 0.9);
      const auto g = learn::dqn_loss_gradient(agent, b, y);
      std::vector<double*> p;
      std::vector<double> a;
      collect(agent.online, g, p, a);
      auto loss = [&] {
        double l = 0.0;
        learn::dqn_loss_gradient(agent, b, y, &l);
        return l;
      };
      out.push_back({"dqn_q", max_gradient_error(loss, p, a)});
    }
    {
      learn::DdpgAgent agent = learn::make_ddpg(rng, 4, 5, 2, {8, 6}, {}, {});
      jitter_biases(agent.actor, rng);
      jitter_biases(agent.critic, rng);
      const Eigen::MatrixXd in = random_matrix(rng, 4, batch);
      const Eigen::MatrixXd ctx = random_matrix(rng, 5, batch);
      const Eigen::MatrixXd act = random_matrix(rng, 2, batch);
      const Eigen::VectorXd y = random_matrix(rng, batch, 1).col(0);
      const Eigen::MatrixXd critic_in = learn::vstack({&ctx, &act});
      const auto gc = learn::regression_gradient(agent.critic, critic_in, y);
      std::vector<double*> p;
      std::vector<double> a;
      collect(agent.critic, gc, p, a);
      auto closs = [&] {
        double l = 0.0;
        learn::regression_gradient(agent.critic, critic_in, y, &l);
        return l;
      };
      out.push_back({"ddpg_critic", max_gradient_error(closs, p, a)});
      const auto ga = learn::ddpg_actor_gradient(agent, in, ctx);
      p.clear();
      a.clear();
      collect(agent.actor, ga, p, a);
      auto aloss = [&] {
        double l = 0.0;
        learn::ddpg_actor_gradient(agent, in, ctx, &l);
        return l;
      };
      out.push_back({"ddpg_actor", max_gradient_error(aloss, p, a)});
    }
    {
      learn::SacAgent agent = learn::make_sac(rng, 4, 5, 2, {8, 6}, {}, {});
      for (learn::Mlp* n : {&agent.actor, &agent.q1, &agent.q2}) jitter_biases(*n, rng);
      const Eigen::MatrixXd in = random_matrix(rng, 4, batch);
      const Eigen::MatrixXd ctx = random_matrix(rng, 5, batch);
      const Eigen::MatrixXd act = random_matrix(rng, 2, batch);
      const Eigen::VectorXd y = random_matrix(rng, batch, 1).col(0);
      const Eigen::MatrixXd critic_in = learn::vstack({&ctx, &act});
      for (int q = 0; q < 2; ++q) {
        learn::Mlp& net = q == 0 ? agent.q1 : agent.q2;
        const auto gc = learn::regression_gradient(net, critic_in, y);
        std::vector<double*> p;
        std::vector<double> a;
        collect(net, gc, p, a);
        auto closs = [&] {
          double l = 0.0;
          learn::regression_gradient(net, critic_in, y, &l);
          return l;
        };
        out.push_back({q == 0 ? "sac_q1" : "sac_q2", max_gradient_error(closs, p, a)});
      }
      std::normal_distribution<double> nd(0.0, 1.0);
      Eigen::MatrixXd noise(2, batch);
      for (Eigen::Index i = 0; i < noise.size(); ++i) noise.data()[i] = nd(rng);
      const double alpha = 0.2;
      const auto ga = learn::sac_actor_gradient(agent, in, ctx, noise, alpha);
      std::vector<double*> p;
      std::vector<double> a;
      collect(agent.actor, ga, p, a);
      auto aloss = [&] { return learn::sac_actor_loss(agent, in, ctx, noise, alpha); };
      out.push_back({"sac_actor", max_gradient_error(aloss, p, a)});
    }
  }
  return out;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"channel", "ris", "case1", "case2", "case3", "learn"};
  return names;
}

std::vector<CheckResult> run_suite(const std::string& suite, std::ostream* log) {
  std::vector<std::string> todo;
  if (suite == "all") {
    todo = suite_names();
  } else if (std::find(suite_names().begin(), suite_names().end(), suite) != suite_names().end()) {
    todo = {suite};
  } else {
    throw ConfigError("validate: unknown suite '" + suite +
                      "' (expected channel, ris, case1, case2, case3, learn or all)");
  }
  std::vector<CheckResult> out;
  for (const auto& name : todo) {
    std::vector<CheckResult> r;
    if (name == "channel") r = channel_suite();
    if (name == "ris") r = ris_suite();
    if (name == "case1") r = case1_suite();
    if (name == "case2") r = case2_suite();
    if (name == "case3") r = case3_suite();
    if (name == "learn") r = learn_suite();
    for (auto& c : r) {
      if (log)
        *log << (c.pass ? "PASS " : "FAIL ") << c.suite << '.' << c.name << "  observed=" << c.observed
             << " tolerance=" << c.tolerance << " margin=" << c.margin << " (" << c.seconds << " s)  "
             << c.detail << '\n';
      out.push_back(std::move(c));
    }
  }
  return out;
}

}  // namespace risiort::app
