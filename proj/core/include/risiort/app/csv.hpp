#pragma once

#include <string>
#include <vector>

namespace risiort::app {

// Header names carry their unit in brackets, e.g. "sum_rate[bit/s/Hz]".
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Shortest round-trip decimal form; identical inputs give identical text.
std::string format_number(double v);

std::string to_csv_text(const CsvTable& t);
// Refuses to replace an existing file.
void write_csv(const std::string& path, const CsvTable& t);
CsvTable read_csv(const std::string& path);

}  // namespace risiort::app
