#pragma once

#include "risiort/learn/mlp.hpp"

namespace risiort::learn {

enum class OptimizerKind { kSgd, kAdam };

struct OptimizerParams {
  OptimizerKind kind = OptimizerKind::kAdam;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double max_grad_norm = 0.0;  // 0 disables global-norm clipping
};

// Descends along the given gradients; state shapes follow the first net seen.
class Optimizer {
 public:
  Optimizer() = default;
  Optimizer(const Mlp& net, OptimizerParams p);

  void step(Mlp& net, WeightSet grads);
  const OptimizerParams& params() const { return p_; }
  long steps() const { return t_; }

 private:
  OptimizerParams p_;
  WeightSet m_;
  WeightSet v_;
  long t_ = 0;
};

double global_norm(const WeightSet& g);

}  // namespace risiort::learn
