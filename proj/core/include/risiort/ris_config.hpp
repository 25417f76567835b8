#pragma once

#include <optional>
#include <vector>

namespace risiort {

// Phase-only RIS configuration with unit amplitude. When bit_depth is set,
// every phase is exactly a codebook point 2*pi*k / 2^bit_depth.
struct RisConfig {
  std::vector<double> phases;  // rad, [0, 2*pi)
  std::optional<int> bit_depth;

  std::size_t element_count() const { return phases.size(); }
};

}  // namespace risiort
