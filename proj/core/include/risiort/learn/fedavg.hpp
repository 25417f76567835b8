#pragma once

#include <vector>

#include "risiort/learn/mlp.hpp"

namespace risiort::learn {

// Elementwise arithmetic mean. Each element's values are summed in sorted
// order, so the result does not depend on the order of the inputs; equal
// inputs are returned unchanged. Throws ContractViolation on shape mismatch.
WeightSet fed_avg(const std::vector<WeightSet>& sets);

// Replaces the weights of every net with the mean over all of them.
void fed_avg_in_place(const std::vector<Mlp*>& nets);

}  // namespace risiort::learn
