#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "risiort/app/csv.hpp"
#include "risiort/app/scenario.hpp"

namespace risiort::app {

struct RunOptions {
  std::optional<std::vector<std::uint64_t>> seeds;  // replaces the scenario's list
  std::optional<std::string> out_dir;
  bool plots = true;
};

struct MetricSummary {
  std::string name;
  std::string unit;
  double mean = 0.0;
  double median = 0.0;
  double min = 0.0;
  double max = 0.0;
};

struct FinalMetric {
  std::string name;
  std::string unit;
  double value = 0.0;
};

struct SeedSeries {
  std::uint64_t seed = 0;
  CsvTable table;
  std::vector<FinalMetric> final_metrics;
};

struct RunReport {
  std::string case_id;
  std::string scenario_name;
  std::string label;  // what distinguishes this run in a comparison
  std::uint64_t scenario_hash = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<SeedSeries> series;  // one per completed seed, seed order
  std::vector<MetricSummary> summary;
  double wall_clock_s = 0.0;
  std::string output_dir;
  bool partial = false;
  std::string error;
};

// mean, median, min and max of the per-seed final metrics.
std::vector<MetricSummary> summarize(const std::vector<SeedSeries>& series);

// Environment variable naming the default output root.
inline constexpr const char* kOutputRootEnv = "RISIORT_OUTPUT_ROOT";

// --out, else the scenario's output_dir, else <root>/<name>-<hash prefix>;
// an existing directory gets the first free "-1", "-2", ... suffix.
std::string resolve_output_dir(const ScenarioSpec& spec, const RunOptions& opt);

// Executes every seed in order and writes seed_<s>.csv, summary.csv,
// report.json and optional SVG plots. On failure the completed seeds are
// still written, the report is flagged partial and the error is rethrown.
RunReport run_scenario(const ScenarioSpec& spec, const RunOptions& opt, std::ostream* log = nullptr);

void write_report_json(const std::string& path, const RunReport& r);
RunReport read_report_json(const std::string& path);

}  // namespace risiort::app
