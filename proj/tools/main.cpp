// risiort: run scenarios, execute the oracle suites, compare finished runs.
//
// Exit codes: 0 ok, 2 invalid input or failed validation check, 3 runtime
// failure (partial outputs are flagged in the run directory).

#include <cstdint>
#include <exception>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "risiort/app/report.hpp"
#include "risiort/app/runner.hpp"
#include "risiort/app/scenario.hpp"
#include "risiort/app/validation.hpp"
#include "risiort/error.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 2;
constexpr int kExitRuntime = 3;

// "1,2,3" or repeated flags; every entry must be a non-negative integer.
std::vector<std::uint64_t> parse_seed_list(const std::vector<std::string>& raw) {
  std::vector<std::uint64_t> seeds;
  for (const auto& chunk : raw) {
    std::stringstream ss(chunk);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item.empty()) continue;
      std::size_t used = 0;
      unsigned long long v = 0;
      try {
        v = std::stoull(item, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != item.size() || item.front() == '-')
        throw risiort::ConfigError("--seed: '" + item + "' is not a non-negative integer");
      seeds.push_back(v);
    }
  }
  if (seeds.empty()) throw risiort::ConfigError("--seed: empty seed list");
  return seeds;
}

int cmd_run(const std::string& scenario, const std::vector<std::string>& seed_args,
            const std::optional<std::string>& out, const std::vector<std::string>& override_args,
            bool plots) {
  risiort::app::ScenarioSpec spec;
  risiort::app::RunOptions opt;
  try {
    std::vector<risiort::app::Override> overrides;
    for (const auto& o : override_args) overrides.push_back(risiort::app::parse_override(o));
    spec = risiort::app::load_scenario(scenario, overrides);
    if (!seed_args.empty()) opt.seeds = parse_seed_list(seed_args);
  } catch (const risiort::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  opt.out_dir = out;
  opt.plots = plots;
  try {
    const auto report = risiort::app::run_scenario(spec, opt, &std::cerr);
    std::cout << "run " << report.scenario_name << " (" << report.label << ") -> " << report.output_dir
              << '\n';
    for (const auto& m : report.summary)
      std::cout << "  " << m.name << " [" << m.unit << "] mean=" << m.mean << " median=" << m.median
                << " min=" << m.min << " max=" << m.max << '\n';
    std::cout << "  wall_clock_s=" << report.wall_clock_s << '\n';
  } catch (const risiort::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

int cmd_validate(const std::string& suite) {
  std::vector<risiort::app::CheckResult> results;
  try {
    results = risiort::app::run_suite(suite, &std::cout);
  } catch (const risiort::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << '\n';
    return kExitRuntime;
  }
  std::size_t failed = 0;
  for (const auto& r : results) failed += r.pass ? 0 : 1;
  std::cout << results.size() - failed << '/' << results.size() << " checks passed\n";
  return failed == 0 ? kExitOk : kExitInvalid;
}

int cmd_report(const std::vector<std::string>& dirs, const std::optional<std::string>& out, bool plots) {
  try {
    const auto cmp = risiort::app::compare_runs(dirs, out, plots);
    std::cout << risiort::app::to_csv_text(cmp.table);
    std::cout << "comparison -> " << cmp.output_dir << '\n';
  } catch (const risiort::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RIS-assisted IoRT simulator and learners"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Execute a scenario file");
  std::string scenario;
  std::vector<std::string> seeds;
  std::optional<std::string> run_out;
  std::vector<std::string> overrides;
  bool run_no_plots = false;
  run->add_option("--scenario", scenario, "Scenario JSON file")->required();
  run->add_option("--seed", seeds, "Seed list replacing the scenario's, e.g. 1,2,3");
  run->add_option("--out", run_out, "Output directory (must not exist)");
  run->add_option("--override", overrides, "Field override key.path=value (repeatable)");
  run->add_flag("--no-plots", run_no_plots, "Skip SVG output");

  auto* validate = app.add_subcommand("validate", "Run oracle and property checks");
  std::string suite = "all";
  validate->add_option("--suite", suite, "channel|ris|case1|case2|case3|learn|all");

  auto* report = app.add_subcommand("report", "Compare finished runs");
  std::vector<std::string> dirs;
  std::optional<std::string> report_out;
  bool report_no_plots = false;
  report->add_option("run_dirs", dirs, "Run directories holding report.json")->required();
  report->add_option("--out", report_out, "Output directory (must not exist)");
  report->add_flag("--no-plots", report_no_plots, "Skip SVG output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  std::cout << std::setprecision(6);
  if (*run) return cmd_run(scenario, seeds, run_out, overrides, !run_no_plots);
  if (*validate) return cmd_validate(suite);
  return cmd_report(dirs, report_out, !report_no_plots);
}
