#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace risiort::app {

// margin > 0 means the check passed with that much room; units follow the
// tolerance (absolute, relative or a count, as named in the detail).
struct CheckResult {
  std::string suite;
  std::string name;
  bool pass = false;
  double observed = 0.0;
  double tolerance = 0.0;
  double margin = 0.0;
  double seconds = 0.0;
  std::string detail;
};

const std::vector<std::string>& suite_names();  // channel ris case1 case2 case3 learn

// "all" runs every suite in order. Throws ConfigError for unknown names.
std::vector<CheckResult> run_suite(const std::string& suite, std::ostream* log = nullptr);

// |a - n| / max(|a|, |n|, floor).
double relative_error(double analytic, double numeric, double floor = 1e-6);
inline constexpr double kGradientFloor = 1e-6;

// Central differences of `loss` around `params` (perturbed in place and
// restored), compared entrywise with `analytic`; returns the largest
// relative error.
double max_gradient_error(const std::function<double()>& loss, std::vector<double*> params,
                          const std::vector<double>& analytic, double h = 1e-5);

struct HeadCheck {
  std::string head;
  double max_relative_error = 0.0;
};

// Finite-difference battery over every network head used by the learners
// (plain MLP linear/tanh, DQN loss, DDPG critic/actor, SAC critics/actor),
// one entry per head and seed.
std::vector<HeadCheck> gradient_battery(int seeds);

}  // namespace risiort::app
