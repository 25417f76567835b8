#include "risiort/app/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <fstream>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "risiort/app/svg.hpp"
#include "risiort/error.hpp"
#include "risiort/hash.hpp"
#include "risiort/isac.hpp"
#include "risiort/learn/double_agent.hpp"
#include "risiort/learn/fdrl.hpp"
#include "risiort/ris.hpp"

namespace risiort::app {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string seed_file(std::uint64_t seed) { return "seed_" + std::to_string(seed) + ".csv"; }

std::vector<std::string> row(std::initializer_list<double> values) {
  std::vector<std::string> r;
  for (double v : values) r.push_back(format_number(v));
  return r;
}

std::string run_label(const ScenarioSpec& s) {
  std::ostringstream o;
  switch (s.case_id) {
    case CaseId::kCase1:
      o << (s.case1.config.access_mode == case1::AccessMode::kNoma ? "noma" : "oma") << '@'
        << format_number(s.case1.config.max_power_dbm) << "dBm";
      break;
    case CaseId::kCase2:
      o << "tchebycheff@" << format_number(s.case2.power_budget_dbm) << "dBm";
      break;
    case CaseId::kCase3:
      o << learn::variant_name(s.case3.variant);
      break;
  }
  return o.str();
}

SeedSeries run_case1(const ScenarioSpec& spec, std::uint64_t seed) {
  learn::TrainSchedule sched = spec.schedule;
  sched.seed = seed;
  const case1::Case1Config cfg = spec.case1.config;
  learn::Case1EnvFactory factory = [cfg](std::uint64_t s) { return case1::TrajectoryEnv(cfg, s); };
  const learn::FdrlResult res = learn::fdrl_train(factory, sched);
  const learn::FdrlEvaluation ev =
      learn::fdrl_evaluate(res.agents, factory, spec.case1.eval_episodes, derive_seed(seed, 99));
  SeedSeries s;
  s.seed = seed;
  s.table.header = {"episode[-]", "energy_efficiency[bit/J]", "sum_rate[bit/s/Hz]",
                    "arrival_rate[fraction]"};
  for (std::size_t e = 0; e < res.metrics.energy_efficiency.size(); ++e)
    s.table.rows.push_back(row({static_cast<double>(e), res.metrics.energy_efficiency[e],
                                res.metrics.sum_rate[e], res.metrics.arrival_rate[e]}));
  s.final_metrics = {
      {"energy_efficiency_final", "bit/J", learn::final_window_mean(res.metrics.energy_efficiency)},
      {"sum_rate_final", "bit/s/Hz", learn::final_window_mean(res.metrics.sum_rate)},
      {"arrival_rate_final", "fraction", learn::final_window_mean(res.metrics.arrival_rate)},
      {"eval_arrival_rate", "fraction", ev.arrival_rate},
      {"eval_energy_efficiency", "bit/J", ev.energy_efficiency},
      {"eval_sum_rate", "bit/s/Hz", ev.sum_rate},
  };
  return s;
}

SeedSeries run_case2(const ScenarioSpec& spec, std::uint64_t seed) {
  const Case2Block& c = spec.case2;
  Rng rng(seed);
  RisConfig ris;
  ris.phases = c.ris_phases.empty()
                   ? std::vector<double>(static_cast<std::size_t>(spec.topology.ris.elements), 0.0)
                   : c.ris_phases;
  isac::IsacConfig cfg =
      isac::config_from_topology(rng, spec.topology, spec.link, ris, c.target_angles, c.power_budget_dbm);
  cfg.desired_pattern = isac::mainlobe_pattern(cfg.angle_grid, c.target_angles, c.mainlobe_halfwidth);
  Rng solve_rng(derive_seed(seed, 1));
  const isac::IdealPoint ideal = isac::ideal_point(solve_rng, cfg, c.solver);
  const auto entries = isac::sweep(solve_rng, cfg, isac::uniform_weights(c.weight_count), c.solver, ideal);
  const auto front = isac::pareto_front(entries);

  SeedSeries s;
  s.seed = seed;
  s.table.header = {"weight_rate[-]", "weight_error[-]", "sum_rate[bit/s/Hz]", "pattern_error[W^2]",
                    "non_dominated[bool]"};
  std::vector<isac::ObjectivePair> points;
  for (const auto& e : entries) points.push_back(e.solution.objectives);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    bool dominated = false;
    for (const auto& p : points) dominated = dominated || isac::dominates(p, points[i]);
    const auto& e = entries[i];
    s.table.rows.push_back(row({e.weights.rate, e.weights.error, e.solution.objectives.sum_rate,
                                e.solution.objectives.pattern_error, dominated ? 0.0 : 1.0}));
  }
  double max_rate = 0.0;
  double min_err = std::numeric_limits<double>::infinity();
  for (const auto& p : front) {
    max_rate = std::max(max_rate, p.sum_rate);
    min_err = std::min(min_err, p.pattern_error);
  }
  s.final_metrics = {
      {"pareto_points", "count", static_cast<double>(front.size())},
      {"max_sum_rate", "bit/s/Hz", max_rate},
      {"min_pattern_error", "W^2", min_err},
      {"soo_rate_extreme", "bit/s/Hz", ideal.rate_extreme.objectives.sum_rate},
      {"soo_error_extreme", "W^2", ideal.error_extreme.objectives.pattern_error},
  };
  if (c.compare_independent) {
    const isac::Weights half{0.5, 0.5};
    Rng coord_rng(derive_seed(seed, 2));
    const auto coord = isac::solve_scalarized(coord_rng, cfg, half, c.solver, ideal);
    Rng ind_rng(derive_seed(seed, 3));
    const auto ind_w = isac::solve_independent(ind_rng, cfg, half, c.solver);
    const auto ind = isac::evaluate(cfg, ind_w);
    s.final_metrics.push_back({"coordinated_tchebycheff", "-", coord.scalarized});
    s.final_metrics.push_back(
        {"independent_tchebycheff", "-", isac::tchebycheff_scalarize(ind, half, ideal.reference)});
    s.final_metrics.push_back({"coordinated_sum_rate", "bit/s/Hz", coord.objectives.sum_rate});
    s.final_metrics.push_back({"independent_sum_rate", "bit/s/Hz", ind.sum_rate});
  }
  return s;
}

SeedSeries run_case3(const ScenarioSpec& spec, std::uint64_t seed) {
  learn::TrainSchedule sched = spec.schedule;
  sched.seed = seed;
  const aircomp::Case3Config cfg = spec.case3.config;
  learn::Case3EnvFactory factory = [cfg](std::uint64_t s) { return aircomp::AirCompEnv(cfg, s); };
  const auto res = learn::double_agent_train(factory, sched, spec.case3.variant);
  SeedSeries s;
  s.seed = seed;
  s.table.header = {"episode[-]", "mse[-]", "reward[-]"};
  for (std::size_t e = 0; e < res.metrics.episode_mse.size(); ++e)
    s.table.rows.push_back(
        row({static_cast<double>(e), res.metrics.episode_mse[e], res.metrics.episode_reward[e]}));
  s.final_metrics = {
      {"mse_final", "-", learn::final_window_mean(res.metrics.episode_mse)},
      {"mse_first_episode", "-", res.metrics.episode_mse.front()},
      {"reward_final", "-", learn::final_window_mean(res.metrics.episode_reward)},
  };
  return s;
}

double column(const CsvTable& t, std::size_t row_i, std::size_t col) {
  return std::strtod(t.rows[row_i][col].c_str(), nullptr);
}

std::string plots_svg(const ScenarioSpec& spec, const std::vector<SeedSeries>& series) {
  PlotSpec p;
  if (spec.case_id == CaseId::kCase2) {
    p.title = spec.name + ": Pareto sweep";
    p.x_label = "sum rate [bit/s/Hz]";
    p.y_label = "beampattern error [W^2]";
    for (const auto& s : series) {
      PlotSeries ps{"seed " + std::to_string(s.seed), {}, {}, true};
      for (std::size_t i = 0; i < s.table.rows.size(); ++i) {
        ps.x.push_back(column(s.table, i, 2));
        ps.y.push_back(column(s.table, i, 3));
      }
      p.series.push_back(std::move(ps));
    }
    return line_plot_svg(p);
  }
  const bool c1 = spec.case_id == CaseId::kCase1;
  p.title = spec.name + (c1 ? ": energy efficiency per episode" : ": average MSE per episode");
  p.x_label = "episode";
  p.y_label = c1 ? "energy efficiency [bit/J]" : "MSE";
  for (const auto& s : series) {
    PlotSeries ps{"seed " + std::to_string(s.seed), {}, {}, false};
    for (std::size_t i = 0; i < s.table.rows.size(); ++i) {
      ps.x.push_back(column(s.table, i, 0));
      ps.y.push_back(column(s.table, i, 1));
    }
    p.series.push_back(std::move(ps));
  }
  return line_plot_svg(p);
}

void write_outputs(const ScenarioSpec& spec, const RunOptions& opt, RunReport& rep) {
  CsvTable summary;
  summary.header = {"metric", "unit", "mean", "median", "min", "max", "seeds[count]"};
  for (const auto& m : rep.summary)
    summary.rows.push_back({m.name, m.unit, format_number(m.mean), format_number(m.median),
                            format_number(m.min), format_number(m.max),
                            std::to_string(rep.series.size())});
  write_csv((fs::path(rep.output_dir) / "summary.csv").string(), summary);
  if (opt.plots && !rep.series.empty())
    write_text_file((fs::path(rep.output_dir) / "curves.svg").string(), plots_svg(spec, rep.series));
  write_report_json((fs::path(rep.output_dir) / "report.json").string(), rep);
}

}  // namespace

std::vector<MetricSummary> summarize(const std::vector<SeedSeries>& series) {
  std::vector<MetricSummary> out;
  if (series.empty()) return out;
  for (std::size_t i = 0; i < series.front().final_metrics.size(); ++i) {
    std::vector<double> v;
    for (const auto& s : series) v.push_back(s.final_metrics.at(i).value);
    std::sort(v.begin(), v.end());
    MetricSummary m;
    m.name = series.front().final_metrics[i].name;
    m.unit = series.front().final_metrics[i].unit;
    double sum = 0.0;
    for (double x : v) sum += x;
    m.mean = sum / static_cast<double>(v.size());
    const std::size_t n = v.size();
    m.median = n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
    m.min = v.front();
    m.max = v.back();
    out.push_back(m);
  }
  return out;
}

std::string resolve_output_dir(const ScenarioSpec& spec, const RunOptions& opt) {
  fs::path base;
  if (opt.out_dir) {
    base = *opt.out_dir;
  } else if (spec.output_dir) {
    base = *spec.output_dir;
  } else {
    const char* root = std::getenv(kOutputRootEnv);
    base = fs::path(root && *root ? root : "runs") / (spec.name + "-" + hex64(spec.hash).substr(0, 8));
  }
  fs::path candidate = base;
  for (int i = 1; fs::exists(candidate); ++i) candidate = base.string() + "-" + std::to_string(i);
  return candidate.string();
}

RunReport run_scenario(const ScenarioSpec& spec, const RunOptions& opt, std::ostream* log) {
  const auto t0 = std::chrono::steady_clock::now();
  RunReport rep;
  rep.case_id = case_name(spec.case_id);
  rep.scenario_name = spec.name;
  rep.label = run_label(spec);
  rep.scenario_hash = spec.hash;
  rep.seeds = opt.seeds ? *opt.seeds : spec.seeds;
  if (rep.seeds.empty()) throw ConfigError("seeds: at least one seed is required");
  rep.output_dir = resolve_output_dir(spec, opt);
  fs::create_directories(rep.output_dir);
  if (log) *log << "output: " << rep.output_dir << '\n';

  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };
  try {
    for (std::uint64_t seed : rep.seeds) {
      if (log) *log << rep.case_id << " seed " << seed << " ..." << std::flush;
      SeedSeries s;
      switch (spec.case_id) {
        case CaseId::kCase1: s = run_case1(spec, seed); break;
        case CaseId::kCase2: s = run_case2(spec, seed); break;
        case CaseId::kCase3: s = run_case3(spec, seed); break;
      }
      write_csv((fs::path(rep.output_dir) / seed_file(seed)).string(), s.table);
      if (log) {
        *log << " done";
        for (const auto& m : s.final_metrics) *log << "  " << m.name << "=" << format_number(m.value);
        *log << '\n';
      }
      rep.series.push_back(std::move(s));
    }
  } catch (const std::exception& e) {
    rep.partial = true;
    rep.error = e.what();
    rep.summary = summarize(rep.series);
    rep.wall_clock_s = elapsed();
    try {
      write_text_file((fs::path(rep.output_dir) / "PARTIAL").string(), rep.error + "\n");
      write_outputs(spec, opt, rep);
    } catch (...) {
      // The original failure is the one worth reporting.
    }
    throw;
  }
  rep.summary = summarize(rep.series);
  rep.wall_clock_s = elapsed();
  write_outputs(spec, opt, rep);
  return rep;
}

void write_report_json(const std::string& path, const RunReport& r) {
  json j;
  j["format"] = "risiort-run-report v1";
  j["case"] = r.case_id;
  j["scenario"] = r.scenario_name;
  j["label"] = r.label;
  j["scenario_hash"] = hex64(r.scenario_hash);
  j["seeds"] = r.seeds;
  j["wall_clock_s"] = r.wall_clock_s;
  j["partial"] = r.partial;
  if (r.partial) j["error"] = r.error;
  json series = json::array();
  for (const auto& s : r.series) {
    json fm = json::array();
    for (const auto& m : s.final_metrics) fm.push_back({{"name", m.name}, {"unit", m.unit}, {"value", m.value}});
    series.push_back({{"seed", s.seed}, {"csv", seed_file(s.seed)}, {"final_metrics", fm}});
  }
  j["series"] = series;
  json summary = json::array();
  for (const auto& m : r.summary)
    summary.push_back({{"name", m.name}, {"unit", m.unit}, {"mean", m.mean}, {"median", m.median},
                       {"min", m.min}, {"max", m.max}});
  j["summary"] = summary;
  write_text_file(path, j.dump(2) + "\n");
}

RunReport read_report_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open run report");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path + ": malformed run report: " + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != "risiort-run-report v1")
      throw ConfigError(path + ": unsupported run report format");
    RunReport r;
    r.case_id = j.at("case").get<std::string>();
    r.scenario_name = j.at("scenario").get<std::string>();
    r.label = j.at("label").get<std::string>();
    r.scenario_hash = std::stoull(j.at("scenario_hash").get<std::string>(), nullptr, 16);
    r.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    r.wall_clock_s = j.at("wall_clock_s").get<double>();
    r.partial = j.at("partial").get<bool>();
    r.output_dir = fs::path(path).parent_path().string();
    for (const auto& s : j.at("series")) {
      SeedSeries ss;
      ss.seed = s.at("seed").get<std::uint64_t>();
      for (const auto& m : s.at("final_metrics"))
        ss.final_metrics.push_back({m.at("name").get<std::string>(), m.at("unit").get<std::string>(),
                                    m.at("value").get<double>()});
      r.series.push_back(std::move(ss));
    }
    for (const auto& m : j.at("summary"))
      r.summary.push_back({m.at("name").get<std::string>(), m.at("unit").get<std::string>(),
                           m.at("mean").get<double>(), m.at("median").get<double>(),
                           m.at("min").get<double>(), m.at("max").get<double>()});
    return r;
  } catch (const json::exception& e) {
    throw ConfigError(path + ": malformed run report: " + e.what());
  }
}

}  // namespace risiort::app
