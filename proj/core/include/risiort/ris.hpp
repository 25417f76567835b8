#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "risiort/channel.hpp"
#include "risiort/random.hpp"
#include "risiort/ris_config.hpp"

namespace risiort {

// Largest N*b the exhaustive search accepts (2^20 configurations).
inline constexpr int kMaxEnumerationBits = 20;

// Codebook point 2*pi*k / 2^b. All quantized phases are produced here so that
// on-codebook inputs round-trip bit-exactly.
double codebook_phase(int index, int bits);

// Maps each phase to the nearest codebook point; exact ties go to the smaller
// index (with 0 counting as smaller than 2^b - 1 across the wrap).
RisConfig quantize_phases(const RisConfig& continuous, int bits);

std::vector<int> phase_indices(const RisConfig& quantized);
RisConfig config_from_indices(const std::vector<int>& indices, int bits);

RisConfig random_config(Rng& rng, std::size_t n, std::optional<int> bits);

using RisObjective = std::function<double(const Eigen::VectorXcd& effective)>;

struct RisSearchResult {
  RisConfig config;
  double objective = 0.0;
};

// Exhaustive argmax over all 2^(N*b) configurations in lexicographic index
// order (last element varies fastest); the first maximum found wins.
// Throws EnumerationLimit when N*b exceeds kMaxEnumerationBits.
RisSearchResult brute_force_best_config(const ChannelSet& cs, int bits,
                                        const RisObjective& objective);

// Continuous per-element co-phasing of each cascaded term with the direct
// link (or with element 0's term when there is no direct path).
RisConfig align_phases(const ChannelSet& cs);

}  // namespace risiort
