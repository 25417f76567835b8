#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "risiort/learn/mlp.hpp"

namespace risiort::learn {

struct NamedNet {
  std::string name;  // no whitespace
  Mlp net;
};

struct Checkpoint {
  std::uint64_t schedule_hash = 0;
  std::vector<NamedNet> nets;
};

// Line-oriented text dump; every weight is written as a C99 hexfloat so a
// round trip is bit-exact. Layout is documented in the README.
void write_checkpoint(std::ostream& out, const Checkpoint& ckpt);
// Throws ConfigError naming the offending line on malformed input.
Checkpoint read_checkpoint(std::istream& in);

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace risiort::learn
