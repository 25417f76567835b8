#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "risiort/app/csv.hpp"
#include "risiort/app/runner.hpp"

namespace risiort::app {

struct Comparison {
  std::string case_id;
  CsvTable table;  // one row per run and summary metric
  std::string output_dir;
};

// Metric shown in the comparison chart for each case.
std::string headline_metric(const std::string& case_id);

// Loads <dir>/report.json for every run; refuses mixed case ids.
std::vector<RunReport> load_reports(const std::vector<std::string>& run_dirs);
CsvTable comparison_table(const std::vector<RunReport>& reports);

// Writes comparison.csv (and comparison.svg unless plots is false) into a
// fresh directory: out_dir if given, else <output root>/report-<hash prefix>.
Comparison compare_runs(const std::vector<std::string>& run_dirs,
                        const std::optional<std::string>& out_dir, bool plots = true);

}  // namespace risiort::app
