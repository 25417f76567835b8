#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "risiort/aircomp.hpp"
#include "risiort/case1.hpp"
#include "risiort/geometry.hpp"
#include "risiort/channel.hpp"
#include "risiort/isac.hpp"
#include "risiort/learn/double_agent.hpp"
#include "risiort/learn/schedule.hpp"

namespace risiort::app {

enum class CaseId { kCase1, kCase2, kCase3 };

std::string case_name(CaseId c);
// Throws ConfigError for anything but case1, case2, case3.
CaseId parse_case(const std::string& name);

struct Case1Block {
  case1::Case1Config config;  // topology and link filled from the shared blocks
  int eval_episodes = 100;
};

struct Case2Block {
  std::vector<double> target_angles;  // rad
  std::vector<double> ris_phases;     // rad, one per element; empty = all zero
  double power_budget_dbm = 25.0;     // per BS
  double mainlobe_halfwidth = 0.0872664625997164788;  // rad (5 degrees)
  int weight_count = 11;
  isac::SolverParams solver;
  bool compare_independent = true;    // also solve the per-BS baseline at (0.5, 0.5)
};

struct Case3Block {
  aircomp::Case3Config config;  // topology and link filled from the shared blocks
  learn::Variant variant = learn::Variant::kDoubleSac;
};

struct ScenarioSpec {
  CaseId case_id = CaseId::kCase1;
  std::string name;
  std::vector<std::uint64_t> seeds;
  std::optional<std::string> output_dir;
  Topology topology;
  LinkParams link;
  learn::TrainSchedule schedule;  // seed is overwritten per run seed
  Case1Block case1;
  Case2Block case2;
  Case3Block case3;

  // Normalized JSON with every default filled in and output_dir dropped;
  // keys sorted, so whitespace and key order do not matter.
  std::string canonical;
  std::uint64_t hash = 0;
};

// "a.b.c=value"; value is read as JSON when it parses, else as a string.
struct Override {
  std::string path;
  std::string value;
};
Override parse_override(const std::string& text);

// Parse errors carry "<source>:<line>:<column>", schema errors the dotted
// field path; both are thrown as ConfigError.
ScenarioSpec parse_scenario(const std::string& text, const std::vector<Override>& overrides = {},
                            const std::string& source = "<scenario>");
ScenarioSpec load_scenario(const std::string& path, const std::vector<Override>& overrides = {});

}  // namespace risiort::app
