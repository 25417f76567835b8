#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace risiort {

// Caller broke a documented precondition (dimension mismatch, finished
// episode, invalid permutation, ...).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Scenario / environment configuration is unusable.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An exhaustive search was asked to enumerate more than its guard allows.
class EnumerationLimit : public std::runtime_error {
 public:
  EnumerationLimit(const std::string& what, std::size_t limit)
      : std::runtime_error(what), limit_(limit) {}
  std::size_t limit() const noexcept { return limit_; }

 private:
  std::size_t limit_;
};

// Iterative solver produced a non-finite objective.
class SolverFailure : public std::runtime_error {
 public:
  SolverFailure(const std::string& what, int iteration)
      : std::runtime_error(what), iteration_(iteration) {}
  int iteration() const noexcept { return iteration_; }

 private:
  int iteration_;
};

inline void require(bool condition, const char* message) {
  if (!condition) throw ContractViolation(message);
}

}  // namespace risiort
