#include "risiort/ris.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "risiort/error.hpp"

namespace risiort {

namespace {

double wrap_phase(double theta) {
  double w = std::fmod(theta, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  if (w >= kTwoPi) w = 0.0;
  return w;
}

int nearest_index(double theta, int bits) {
  const int levels = 1 << bits;
  const double step = kTwoPi / levels;
  const double x = wrap_phase(theta) / step;
  int k = static_cast<int>(std::floor(x));
  const double frac = x - k;
  if (frac > 0.5 || (frac == 0.5 && k == levels - 1)) ++k;
  return k % levels;
}

}  // namespace

double codebook_phase(int index, int bits) {
  return kTwoPi * static_cast<double>(index) / static_cast<double>(1 << bits);
}

RisConfig quantize_phases(const RisConfig& continuous, int bits) {
  require(bits >= 1, "quantize_phases: bit depth must be >= 1");
  RisConfig out;
  out.bit_depth = bits;
  out.phases.reserve(continuous.phases.size());
  for (double theta : continuous.phases)
    out.phases.push_back(codebook_phase(nearest_index(theta, bits), bits));
  return out;
}

std::vector<int> phase_indices(const RisConfig& quantized) {
  require(quantized.bit_depth.has_value(), "phase_indices: configuration is not quantized");
  std::vector<int> idx;
  idx.reserve(quantized.phases.size());
  for (double theta : quantized.phases) idx.push_back(nearest_index(theta, *quantized.bit_depth));
  return idx;
}

RisConfig config_from_indices(const std::vector<int>& indices, int bits) {
  require(bits >= 1, "config_from_indices: bit depth must be >= 1");
  RisConfig out;
  out.bit_depth = bits;
  out.phases.reserve(indices.size());
  for (int k : indices) {
    require(k >= 0 && k < (1 << bits), "config_from_indices: index outside codebook");
    out.phases.push_back(codebook_phase(k, bits));
  }
  return out;
}

RisConfig random_config(Rng& rng, std::size_t n, std::optional<int> bits) {
  RisConfig out;
  out.bit_depth = bits;
  out.phases.reserve(n);
  if (bits) {
    require(*bits >= 1, "random_config: bit depth must be >= 1");
    std::uniform_int_distribution<int> pick(0, (1 << *bits) - 1);
    for (std::size_t i = 0; i < n; ++i) out.phases.push_back(codebook_phase(pick(rng), *bits));
  } else {
    std::uniform_real_distribution<double> u(0.0, kTwoPi);
    for (std::size_t i = 0; i < n; ++i) out.phases.push_back(wrap_phase(u(rng)));
  }
  return out;
}

RisSearchResult brute_force_best_config(const ChannelSet& cs, int bits,
                                        const RisObjective& objective) {
  require(bits >= 1, "brute_force_best_config: bit depth must be >= 1");
  const auto n = static_cast<int>(cs.elements());
  if (static_cast<long long>(n) * bits > kMaxEnumerationBits)
    throw EnumerationLimit("brute_force_best_config: N*b = " + std::to_string(n * bits) +
                               " exceeds the enumeration limit of " +
                               std::to_string(kMaxEnumerationBits) + " bits",
                           kMaxEnumerationBits);

  const int levels = 1 << bits;
  Eigen::VectorXcd unit(levels);
  for (int k = 0; k < levels; ++k) unit(k) = std::polar(1.0, codebook_phase(k, bits));

  // Column n of `cascade` is element n's contribution for theta_n = 0.
  const Eigen::MatrixXcd cascade = cs.g_bs_ris.adjoint() * cs.h_ris_dev.asDiagonal();
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  std::vector<int> best_idx = idx;
  double best = -std::numeric_limits<double>::infinity();
  bool found = false;

  while (true) {
    Eigen::VectorXcd h = cs.h_direct;
    for (int e = 0; e < n; ++e) h += unit(idx[e]) * cascade.col(e);
    const double value = objective(h);
    if (!found || value > best) {
      best = value;
      best_idx = idx;
      found = true;
    }
    int pos = n - 1;
    while (pos >= 0 && ++idx[pos] == levels) idx[pos--] = 0;
    if (pos < 0) break;
  }
  // Re-scored through effective_channel so the reported value is bit-identical
  // to what any caller computes for the returned configuration.
  RisConfig cfg = config_from_indices(best_idx, bits);
  const double value = objective(effective_channel(cs, cfg));
  return {std::move(cfg), value};
}

RisConfig align_phases(const ChannelSet& cs) {
  const Eigen::MatrixXcd cascade = cs.g_bs_ris.adjoint() * cs.h_ris_dev.asDiagonal();
  RisConfig out;
  out.phases.resize(static_cast<std::size_t>(cs.elements()), 0.0);
  if (cs.elements() == 0) return out;
  const Eigen::VectorXcd ref = cs.h_direct.squaredNorm() > 0.0 ? cs.h_direct : cascade.col(0);
  for (Eigen::Index e = 0; e < cs.elements(); ++e) {
    const cd inner = ref.dot(cascade.col(e));  // ref^H c_e
    out.phases[static_cast<std::size_t>(e)] = wrap_phase(-std::arg(inner));
  }
  return out;
}

}  // namespace risiort
