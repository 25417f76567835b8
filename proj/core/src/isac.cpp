#include "risiort/isac.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>

#include "risiort/error.hpp"

namespace risiort::isac {

namespace {

constexpr double kLn2 = 0.69314718055994530942;

double deg(double d) { return d * kPi / 180.0; }

void check_shapes(const IsacConfig& cfg, const BeamformerSet& w) {
  require(static_cast<int>(w.size()) == cfg.bs_count, "isac: one precoder per BS required");
  for (const auto& wm : w)
    require(wm.rows() == cfg.antennas && wm.cols() == cfg.streams(),
            "isac: precoder must be antennas x (users + sensing streams)");
}

Eigen::MatrixXcd steering_matrix(const IsacConfig& cfg) {
  Eigen::MatrixXcd a(cfg.antennas, static_cast<Eigen::Index>(cfg.angle_grid.size()));
  for (std::size_t g = 0; g < cfg.angle_grid.size(); ++g)
    a.col(static_cast<Eigen::Index>(g)) = steering_vector(cfg.angle_grid[g], cfg.antennas);
  return a;
}

// Pattern P_g and LS scale alpha.
struct PatternFit {
  Eigen::VectorXd pattern;
  double alpha = 0.0;
};

PatternFit fit_pattern(const IsacConfig& cfg, const Eigen::MatrixXcd& steer,
                       const BeamformerSet& w) {
  require(!cfg.angle_grid.empty(), "beampattern_error: empty angle grid");
  PatternFit fit;
  fit.pattern = Eigen::VectorXd::Zero(steer.cols());
  for (const auto& wm : w) fit.pattern += (wm.adjoint() * steer).colwise().squaredNorm().transpose();
  const Eigen::Map<const Eigen::VectorXd> d(cfg.desired_pattern.data(),
                                            static_cast<Eigen::Index>(cfg.desired_pattern.size()));
  const double dd = d.squaredNorm();
  fit.alpha = dd > 0.0 ? d.dot(fit.pattern) / dd : 0.0;
  return fit;
}

double frob2(const BeamformerSet& w) {
  double s = 0.0;
  for (const auto& m : w) s += m.squaredNorm();
  return s;
}

void axpy(BeamformerSet& y, double a, const BeamformerSet& x) {
  for (std::size_t m = 0; m < y.size(); ++m) y[m] += a * x[m];
}

using ObjectiveFn = std::function<double(const BeamformerSet&)>;
using GradientFn = std::function<BeamformerSet(const BeamformerSet&)>;

// Monotone projected descent with an adaptive, scale-free step.
BeamformerSet descend(const IsacConfig& cfg, BeamformerSet w, const SolverParams& sp,
                      const ObjectiveFn& f, const GradientFn& grad) {
  project(cfg, w);
  double fw = f(w);
  if (!std::isfinite(fw)) throw SolverFailure("isac solver: non-finite objective at iteration 0", 0);
  const double scale = std::sqrt(cfg.budget_watts() * cfg.bs_count);
  double step = sp.step_size;
  for (int it = 1; it <= sp.iterations; ++it) {
    const BeamformerSet g = grad(w);
    const double gnorm = std::sqrt(frob2(g));
    if (!std::isfinite(gnorm))
      throw SolverFailure("isac solver: non-finite gradient at iteration " + std::to_string(it), it);
    if (gnorm == 0.0) break;
    bool accepted = false;
    while (step > 1e-9) {
      BeamformerSet trial = w;
      axpy(trial, -step * scale / gnorm, g);
      project(cfg, trial);
      const double ft = f(trial);
      if (!std::isfinite(ft))
        throw SolverFailure("isac solver: non-finite objective at iteration " + std::to_string(it),
                            it);
      if (ft < fw) {
        w = std::move(trial);
        fw = ft;
        step = std::min(step * 1.5, 1.0);
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
  }
  return w;
}

double smoothed_max(double t1, double t2, double mu, double& p1, double& p2) {
  const double m = std::max(t1, t2);
  const double e1 = std::exp((t1 - m) / mu);
  const double e2 = std::exp((t2 - m) / mu);
  p1 = e1 / (e1 + e2);
  p2 = e2 / (e1 + e2);
  return m + mu * std::log(e1 + e2);
}

BeamformerSet rate_init(const IsacConfig& cfg) {
  BeamformerSet w = zero_beamformers(cfg);
  const double per_col = std::sqrt(cfg.budget_watts() / cfg.users);
  for (int m = 0; m < cfg.bs_count; ++m)
    for (int k = 0; k < cfg.users; ++k) {
      const Eigen::VectorXcd& h = cfg.user_channels[k][m];
      const double n = h.norm();
      if (n > 0.0) w[m].col(k) = per_col * h / n;
    }
  return w;
}

template <typename Score>
Solution best_of(const IsacConfig& cfg, const std::vector<BeamformerSet>& starts,
                 const SolverParams& sp, const ObjectiveFn& f, const GradientFn& g,
                 const Score& score) {
  std::optional<Solution> best;
  for (const auto& start : starts) {
    BeamformerSet w = descend(cfg, start, sp, f, g);
    const ObjectivePair obj = evaluate(cfg, w);
    const double s = score(obj);
    if (!best || s < best->scalarized) {
      best = Solution{std::move(w), obj, s};
    }
  }
  return *best;
}

IsacConfig single_bs(const IsacConfig& cfg, int m) {
  IsacConfig sub = cfg;
  sub.bs_count = 1;
  for (auto& user : sub.user_channels) user = {user[static_cast<std::size_t>(m)]};
  return sub;
}

}  // namespace

void validate_config(const IsacConfig& cfg) {
  if (cfg.bs_count < 1) throw ConfigError("case2.bs_count must be >= 1");
  if (cfg.antennas < 1) throw ConfigError("case2.antennas must be >= 1");
  if (cfg.users < 1) throw ConfigError("case2.users must be >= 1");
  if (static_cast<int>(cfg.user_channels.size()) != cfg.users)
    throw ConfigError("case2: one channel list per user required");
  for (const auto& u : cfg.user_channels) {
    if (static_cast<int>(u.size()) != cfg.bs_count)
      throw ConfigError("case2: one channel per (user, BS) required");
    for (const auto& h : u)
      if (h.size() != cfg.antennas) throw ConfigError("case2: user channel length != antennas");
  }
  if (cfg.angle_grid.empty()) throw ConfigError("case2.angle_grid must not be empty");
  if (cfg.desired_pattern.size() != cfg.angle_grid.size())
    throw ConfigError("case2.desired_pattern must match the angle grid");
  if (!(cfg.budget_watts() > 0.0)) throw ConfigError("case2.power_budget_dbm must be finite");
  const auto [lo, hi] = std::minmax_element(cfg.angle_grid.begin(), cfg.angle_grid.end());
  for (double t : cfg.target_angles)
    if (t < *lo || t > *hi) throw ConfigError("case2: target angle outside the angle grid");
}

std::vector<double> default_angle_grid() {
  std::vector<double> grid;
  for (int d = -90; d <= 90; ++d) grid.push_back(deg(d));
  return grid;
}

std::vector<double> mainlobe_pattern(const std::vector<double>& grid,
                                     const std::vector<double>& targets, double halfwidth) {
  std::vector<double> d(grid.size(), 0.0);
  for (std::size_t g = 0; g < grid.size(); ++g)
    for (double t : targets)
      if (std::abs(grid[g] - t) <= halfwidth + 1e-12) d[g] = 1.0;
  return d;
}

IsacConfig config_from_topology(Rng& rng, const Topology& t, const LinkParams& lp,
                                const RisConfig& ris, const std::vector<double>& target_angles,
                                double power_budget_dbm) {
  validate_topology(t);
  IsacConfig cfg;
  cfg.bs_count = static_cast<int>(t.bs_list.size());
  cfg.antennas = t.bs_list.front().antennas;
  for (const auto& bs : t.bs_list)
    if (bs.antennas != cfg.antennas)
      throw ConfigError("case2: all base stations must have the same antenna count");
  cfg.users = static_cast<int>(t.devices.size());
  cfg.target_angles = target_angles;
  cfg.angle_grid = default_angle_grid();
  cfg.desired_pattern = mainlobe_pattern(cfg.angle_grid, target_angles, deg(5.0));
  cfg.power_budget_dbm = power_budget_dbm;
  cfg.noise_power_dbm = lp.noise_power_dbm;
  cfg.user_channels.assign(static_cast<std::size_t>(cfg.users), {});
  for (std::size_t m = 0; m < t.bs_list.size(); ++m) {
    const auto sets = sample_channels(rng, t, lp, m);
    for (std::size_t k = 0; k < sets.size(); ++k)
      cfg.user_channels[k].push_back(effective_channel(sets[k], ris));
  }
  validate_config(cfg);
  return cfg;
}

Eigen::VectorXcd steering_vector(double angle, int antennas) {
  return ula_response(antennas, std::sin(angle));
}

double sum_rate(const IsacConfig& cfg, const BeamformerSet& w) {
  check_shapes(cfg, w);
  const int k_users = cfg.users;
  const double noise = cfg.noise_watts();
  double total = 0.0;
  for (int k = 0; k < k_users; ++k) {
    double all = noise;
    double signal = 0.0;
    for (int j = 0; j < cfg.streams(); ++j) {
      if (j < k_users) {
        cd u{};
        for (int m = 0; m < cfg.bs_count; ++m) u += cfg.user_channels[k][m].dot(w[m].col(j));
        const double p = std::norm(u);
        all += p;
        if (j == k) signal = p;
      } else {
        for (int m = 0; m < cfg.bs_count; ++m) all += std::norm(cfg.user_channels[k][m].dot(w[m].col(j)));
      }
    }
    total += std::log2(all / (all - signal));
  }
  return total;
}

std::vector<double> beampattern(const IsacConfig& cfg, const BeamformerSet& w) {
  check_shapes(cfg, w);
  const PatternFit fit = fit_pattern(cfg, steering_matrix(cfg), w);
  return {fit.pattern.data(), fit.pattern.data() + fit.pattern.size()};
}

double beampattern_error(const IsacConfig& cfg, const BeamformerSet& w) {
  check_shapes(cfg, w);
  const PatternFit fit = fit_pattern(cfg, steering_matrix(cfg), w);
  double err = 0.0;
  for (Eigen::Index g = 0; g < fit.pattern.size(); ++g) {
    const double e = fit.alpha * cfg.desired_pattern[static_cast<std::size_t>(g)] - fit.pattern(g);
    err += e * e;
  }
  return err / static_cast<double>(fit.pattern.size());
}

ObjectivePair evaluate(const IsacConfig& cfg, const BeamformerSet& w) {
  return {sum_rate(cfg, w), beampattern_error(cfg, w)};
}

BeamformerSet sum_rate_gradient(const IsacConfig& cfg, const BeamformerSet& w) {
  check_shapes(cfg, w);
  const int k_users = cfg.users;
  const int streams = cfg.streams();
  const double noise = cfg.noise_watts();
  BeamformerSet grad = zero_beamformers(cfg);
  for (int k = 0; k < k_users; ++k) {
    std::vector<cd> u(static_cast<std::size_t>(k_users));
    double all = noise;
    for (int j = 0; j < k_users; ++j) {
      for (int m = 0; m < cfg.bs_count; ++m) u[j] += cfg.user_channels[k][m].dot(w[m].col(j));
      all += std::norm(u[j]);
    }
    for (int j = k_users; j < streams; ++j)
      for (int m = 0; m < cfg.bs_count; ++m) all += std::norm(cfg.user_channels[k][m].dot(w[m].col(j)));
    const double interference = all - std::norm(u[k]);
    const double inv_all = 1.0 / all;
    const double inv_int = 1.0 / interference;
    for (int m = 0; m < cfg.bs_count; ++m) {
      const Eigen::VectorXcd& h = cfg.user_channels[k][m];
      for (int j = 0; j < k_users; ++j) {
        const double c = inv_all - (j == k ? 0.0 : inv_int);
        grad[m].col(j) += (2.0 * c / kLn2) * u[j] * h;
      }
      for (int j = k_users; j < streams; ++j) {
        const cd v = h.dot(w[m].col(j));
        grad[m].col(j) += (2.0 * (inv_all - inv_int) / kLn2) * v * h;
      }
    }
  }
  return grad;
}

BeamformerSet beampattern_error_gradient(const IsacConfig& cfg, const BeamformerSet& w) {
  check_shapes(cfg, w);
  const Eigen::MatrixXcd steer = steering_matrix(cfg);
  const PatternFit fit = fit_pattern(cfg, steer, w);
  Eigen::VectorXd e(fit.pattern.size());
  for (Eigen::Index g = 0; g < e.size(); ++g)
    e(g) = fit.pattern(g) - fit.alpha * cfg.desired_pattern[static_cast<std::size_t>(g)];
  // alpha is the least-squares optimum, so its own variation drops out.
  const Eigen::MatrixXcd kernel =
      (4.0 / static_cast<double>(e.size())) * (steer * e.asDiagonal() * steer.adjoint());
  BeamformerSet grad;
  grad.reserve(w.size());
  for (const auto& wm : w) grad.push_back(kernel * wm);
  return grad;
}

double tchebycheff_scalarize(const ObjectivePair& f, const Weights& w, const Reference& ref) {
  require(w.rate >= 0.0 && w.error >= 0.0, "tchebycheff_scalarize: weights must be >= 0");
  require(ref.norm_rate > 0.0 && ref.norm_error > 0.0, "tchebycheff_scalarize: norms must be > 0");
  return std::max(w.rate * (ref.ideal_rate - f.sum_rate) / ref.norm_rate,
                  w.error * (f.pattern_error - ref.ideal_error) / ref.norm_error);
}

bool feasible(const IsacConfig& cfg, const BeamformerSet& w, double rel_tol) {
  const double budget = cfg.budget_watts();
  return std::all_of(w.begin(), w.end(), [&](const Eigen::MatrixXcd& m) {
    return m.squaredNorm() <= budget * (1.0 + rel_tol);
  });
}

void project(const IsacConfig& cfg, BeamformerSet& w) {
  const double budget = cfg.budget_watts();
  for (auto& m : w) {
    const double p = m.squaredNorm();
    if (p > budget) m *= std::sqrt(budget / p);
  }
}

BeamformerSet zero_beamformers(const IsacConfig& cfg) {
  return BeamformerSet(static_cast<std::size_t>(cfg.bs_count),
                       Eigen::MatrixXcd::Zero(cfg.antennas, cfg.streams()));
}

BeamformerSet random_beamformers(Rng& rng, const IsacConfig& cfg) {
  BeamformerSet w;
  const double budget = cfg.budget_watts();
  for (int m = 0; m < cfg.bs_count; ++m) {
    Eigen::MatrixXcd wm = complex_normal_matrix(rng, cfg.antennas, cfg.streams());
    wm *= std::sqrt(budget) / wm.norm();
    w.push_back(std::move(wm));
  }
  project(cfg, w);
  return w;
}

Solution maximize_sum_rate(Rng& rng, const IsacConfig& cfg, const SolverParams& sp) {
  validate_config(cfg);
  std::vector<BeamformerSet> starts{rate_init(cfg)};
  for (int r = 0; r < sp.restarts; ++r) starts.push_back(random_beamformers(rng, cfg));
  const ObjectiveFn f = [&](const BeamformerSet& w) { return -sum_rate(cfg, w); };
  const GradientFn g = [&](const BeamformerSet& w) {
    BeamformerSet gr = sum_rate_gradient(cfg, w);
    for (auto& m : gr) m = -m;
    return gr;
  };
  return best_of(cfg, starts, sp, f, g, [](const ObjectivePair& o) { return -o.sum_rate; });
}

Solution minimize_pattern_error(Rng& rng, const IsacConfig& cfg, const SolverParams& sp) {
  validate_config(cfg);
  std::vector<BeamformerSet> starts;
  for (int r = 0; r < std::max(sp.restarts, 1); ++r) starts.push_back(random_beamformers(rng, cfg));
  const ObjectiveFn f = [&](const BeamformerSet& w) { return beampattern_error(cfg, w); };
  const GradientFn g = [&](const BeamformerSet& w) { return beampattern_error_gradient(cfg, w); };
  return best_of(cfg, starts, sp, f, g, [](const ObjectivePair& o) { return o.pattern_error; });
}

IdealPoint ideal_point(Rng& rng, const IsacConfig& cfg, const SolverParams& sp) {
  IdealPoint ip;
  ip.rate_extreme = maximize_sum_rate(rng, cfg, sp);
  ip.error_extreme = minimize_pattern_error(rng, cfg, sp);
  auto& ref = ip.reference;
  ref.ideal_rate = std::max(ip.rate_extreme.objectives.sum_rate, ip.error_extreme.objectives.sum_rate);
  ref.ideal_error =
      std::min(ip.error_extreme.objectives.pattern_error, ip.rate_extreme.objectives.pattern_error);
  const double rate_spread = ref.ideal_rate - ip.error_extreme.objectives.sum_rate;
  const double error_spread = ip.rate_extreme.objectives.pattern_error - ref.ideal_error;
  ref.norm_rate = rate_spread > 1e-12 * std::max(1.0, std::abs(ref.ideal_rate)) ? rate_spread : 1.0;
  ref.norm_error = error_spread > 0.0 ? error_spread : 1.0;
  ip.rate_extreme.scalarized = 0.0;
  ip.error_extreme.scalarized = 0.0;
  return ip;
}

Solution solve_scalarized(Rng& rng, const IsacConfig& cfg, const Weights& weights,
                          const SolverParams& sp, const IdealPoint& ideal) {
  validate_config(cfg);
  require(weights.rate >= 0.0 && weights.error >= 0.0, "solve_scalarized: weights must be >= 0");
  require(sp.step_size > 0.0 && sp.iterations > 0 && sp.restarts >= 0 && sp.temperature > 0.0,
          "solve_scalarized: solver parameters must be positive");
  const Reference& ref = ideal.reference;
  const double cr = weights.rate / ref.norm_rate;
  const double ce = weights.error / ref.norm_error;
  const double mu = sp.temperature;

  const ObjectiveFn f = [&](const BeamformerSet& w) {
    const ObjectivePair o = evaluate(cfg, w);
    double p1 = 0.0;
    double p2 = 0.0;
    return smoothed_max(cr * (ref.ideal_rate - o.sum_rate), ce * (o.pattern_error - ref.ideal_error),
                        mu, p1, p2);
  };
  const GradientFn g = [&](const BeamformerSet& w) {
    const ObjectivePair o = evaluate(cfg, w);
    double p1 = 0.0;
    double p2 = 0.0;
    smoothed_max(cr * (ref.ideal_rate - o.sum_rate), ce * (o.pattern_error - ref.ideal_error), mu,
                 p1, p2);
    BeamformerSet gr = zero_beamformers(cfg);
    if (p1 * cr != 0.0) axpy(gr, -p1 * cr, sum_rate_gradient(cfg, w));
    if (p2 * ce != 0.0) axpy(gr, p2 * ce, beampattern_error_gradient(cfg, w));
    return gr;
  };

  std::vector<BeamformerSet> starts{ideal.rate_extreme.w, ideal.error_extreme.w};
  for (int r = 0; r < sp.restarts; ++r) starts.push_back(random_beamformers(rng, cfg));
  return best_of(cfg, starts, sp, f, g, [&](const ObjectivePair& o) {
    return tchebycheff_scalarize(o, weights, ref);
  });
}

Solution solve_scalarized(Rng& rng, const IsacConfig& cfg, const Weights& weights,
                          const SolverParams& sp) {
  const IdealPoint ip = ideal_point(rng, cfg, sp);
  return solve_scalarized(rng, cfg, weights, sp, ip);
}

std::vector<SweepEntry> sweep(Rng& rng, const IsacConfig& cfg, const std::vector<Weights>& weights,
                              const SolverParams& sp, const IdealPoint& ideal) {
  require(weights.size() >= 2, "pareto_sweep: at least two weight vectors required");
  const std::uint64_t base = rng();
  std::vector<SweepEntry> out;
  out.reserve(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) {
    Rng entry_rng(derive_seed(base, i));
    try {
      out.push_back({weights[i], solve_scalarized(entry_rng, cfg, weights[i], sp, ideal)});
    } catch (const SolverFailure& e) {
      throw SolverFailure(std::string(e.what()) + " (weights " + std::to_string(weights[i].rate) +
                              ", " + std::to_string(weights[i].error) + ")",
                          e.iteration());
    }
  }
  return out;
}

std::vector<ObjectivePair> pareto_front(const std::vector<SweepEntry>& entries) {
  std::vector<ObjectivePair> pts;
  pts.reserve(entries.size());
  for (const auto& e : entries) pts.push_back(e.solution.objectives);
  pts = non_dominated_filter(pts);
  std::stable_sort(pts.begin(), pts.end(), [](const ObjectivePair& a, const ObjectivePair& b) {
    return a.sum_rate < b.sum_rate;
  });
  return pts;
}

std::vector<ObjectivePair> pareto_sweep(Rng& rng, const IsacConfig& cfg,
                                        const std::vector<Weights>& weights,
                                        const SolverParams& sp) {
  require(weights.size() >= 2, "pareto_sweep: at least two weight vectors required");
  const IdealPoint ip = ideal_point(rng, cfg, sp);
  return pareto_front(sweep(rng, cfg, weights, sp, ip));
}

std::vector<Weights> uniform_weights(int n) {
  require(n >= 2, "uniform_weights: n must be >= 2");
  std::vector<Weights> out;
  for (int i = 0; i < n; ++i) {
    const double wr = static_cast<double>(i) / static_cast<double>(n - 1);
    out.push_back({wr, 1.0 - wr});
  }
  return out;
}

bool dominates(const ObjectivePair& a, const ObjectivePair& b) {
  return a.sum_rate >= b.sum_rate && a.pattern_error <= b.pattern_error &&
         (a.sum_rate > b.sum_rate || a.pattern_error < b.pattern_error);
}

std::vector<ObjectivePair> non_dominated_filter(const std::vector<ObjectivePair>& points) {
  std::vector<ObjectivePair> out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    const bool dominated =
        std::any_of(points.begin(), points.end(), [&](const ObjectivePair& q) { return dominates(q, p); });
    const bool duplicate = std::find(out.begin(), out.end(), p) != out.end();
    if (!dominated && !duplicate) out.push_back(p);
  }
  return out;
}

BeamformerSet solve_independent(Rng& rng, const IsacConfig& cfg, const Weights& weights,
                                const SolverParams& sp) {
  validate_config(cfg);
  BeamformerSet joint;
  for (int m = 0; m < cfg.bs_count; ++m) {
    const IsacConfig sub = single_bs(cfg, m);
    const IdealPoint ip = ideal_point(rng, sub, sp);
    joint.push_back(solve_scalarized(rng, sub, weights, sp, ip).w.front());
  }
  return joint;
}

}  // namespace risiort::isac
