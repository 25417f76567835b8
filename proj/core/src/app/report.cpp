#include "risiort/app/report.hpp"

#include <cstdlib>
#include <filesystem>

#include "risiort/app/svg.hpp"
#include "risiort/error.hpp"
#include "risiort/hash.hpp"

namespace risiort::app {

namespace fs = std::filesystem;

std::string headline_metric(const std::string& case_id) {
  if (case_id == "case1") return "energy_efficiency_final";
  if (case_id == "case2") return "pareto_points";
  return "mse_final";
}

std::vector<RunReport> load_reports(const std::vector<std::string>& run_dirs) {
  if (run_dirs.empty()) throw ConfigError("report: at least one run directory is required");
  std::vector<RunReport> reports;
  for (const auto& d : run_dirs) {
    reports.push_back(read_report_json((fs::path(d) / "report.json").string()));
    reports.back().output_dir = d;
    if (reports.back().case_id != reports.front().case_id)
      throw ConfigError("report: incompatible case ids (" + reports.front().case_id + " in " +
                        run_dirs.front() + ", " + reports.back().case_id + " in " + d + ")");
  }
  return reports;
}

CsvTable comparison_table(const std::vector<RunReport>& reports) {
  CsvTable t;
  t.header = {"run", "label", "metric", "unit", "mean", "median", "min", "max", "seeds[count]", "partial[bool]"};
  for (const auto& r : reports)
    for (const auto& m : r.summary)
      t.rows.push_back({r.output_dir, r.label, m.name, m.unit, format_number(m.mean),
                        format_number(m.median), format_number(m.min), format_number(m.max),
                        std::to_string(r.series.size()), r.partial ? "1" : "0"});
  return t;
}

Comparison compare_runs(const std::vector<std::string>& run_dirs,
                        const std::optional<std::string>& out_dir, bool plots) {
  const auto reports = load_reports(run_dirs);
  Comparison c;
  c.case_id = reports.front().case_id;
  c.table = comparison_table(reports);

  fs::path base;
  if (out_dir) {
    base = *out_dir;
  } else {
    std::string key;
    for (const auto& d : run_dirs) key += d + "\n";
    const char* root = std::getenv(kOutputRootEnv);
    base = fs::path(root && *root ? root : "runs") / ("report-" + hex64(fnv1a64(key)).substr(0, 8));
  }
  fs::path dir = base;
  for (int i = 1; fs::exists(dir); ++i) dir = base.string() + "-" + std::to_string(i);
  fs::create_directories(dir);
  c.output_dir = dir.string();
  write_csv((dir / "comparison.csv").string(), c.table);

  if (plots) {
    const std::string metric = headline_metric(c.case_id);
    std::vector<Bar> bars;
    for (const auto& r : reports)
      for (const auto& m : r.summary)
        if (m.name == metric) bars.push_back({r.label, m.median});
    write_text_file((dir / "comparison.svg").string(),
                    bar_chart_svg(c.case_id + ": median " + metric, metric, bars));
  }
  return c;
}

}  // namespace risiort::app
