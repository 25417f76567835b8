#include "risiort/learn/fedavg.hpp"

#include <algorithm>

#include "risiort/error.hpp"

namespace risiort::learn {

namespace {

double sorted_mean(std::vector<double>& v) {
  std::sort(v.begin(), v.end());
  if (v.front() == v.back()) return v.front();
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

template <typename M>
void average_into(M& out, const std::vector<const M*>& parts, std::vector<double>& scratch) {
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    scratch.clear();
    for (const M* p : parts) scratch.push_back(p->data()[i]);
    out.data()[i] = sorted_mean(scratch);
  }
}

}  // namespace

WeightSet fed_avg(const std::vector<WeightSet>& sets) {
  require(!sets.empty(), "fed_avg: at least one weight set required");
  for (const auto& s : sets) require(same_shapes(s, sets.front()), "fed_avg: shape mismatch");
  WeightSet out = zeros_like(sets.front());
  std::vector<double> scratch;
  scratch.reserve(sets.size());
  for (std::size_t l = 0; l < out.size(); ++l) {
    std::vector<const Eigen::MatrixXd*> ws;
    std::vector<const Eigen::VectorXd*> bs;
    for (const auto& s : sets) {
      ws.push_back(&s[l].w);
      bs.push_back(&s[l].b);
    }
    average_into(out[l].w, ws, scratch);
    average_into(out[l].b, bs, scratch);
  }
  return out;
}

void fed_avg_in_place(const std::vector<Mlp*>& nets) {
  std::vector<WeightSet> sets;
  sets.reserve(nets.size());
  for (const Mlp* n : nets) sets.push_back(n->weights());
  const WeightSet mean = fed_avg(sets);
  for (Mlp* n : nets) n->set_weights(mean);
}

}  // namespace risiort::learn
