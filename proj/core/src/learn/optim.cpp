#include "risiort/learn/optim.hpp"

#include <cmath>
#include <utility>

#include "risiort/error.hpp"

namespace risiort::learn {

Optimizer::Optimizer(const Mlp& net, OptimizerParams p) : p_(p) {
  require(p_.lr > 0.0, "Optimizer: learning rate must be > 0");
  if (p_.kind == OptimizerKind::kAdam) {
    m_ = zeros_like(net.weights());
    v_ = zeros_like(net.weights());
  }
}

double global_norm(const WeightSet& g) {
  double s = 0.0;
  for (const auto& l : g) s += l.w.squaredNorm() + l.b.squaredNorm();
  return std::sqrt(s);
}

void Optimizer::step(Mlp& net, WeightSet grads) {
  auto& w = net.weights();
  require(same_shapes(w, grads), "Optimizer::step: gradient shapes do not match the net");
  if (p_.max_grad_norm > 0.0) {
    const double n = global_norm(grads);
    if (n > p_.max_grad_norm) {
      const double s = p_.max_grad_norm / n;
      for (auto& l : grads) {
        l.w *= s;
        l.b *= s;
      }
    }
  }
  ++t_;
  if (p_.kind == OptimizerKind::kSgd) {
    for (std::size_t i = 0; i < w.size(); ++i) {
      w[i].w -= p_.lr * grads[i].w;
      w[i].b -= p_.lr * grads[i].b;
    }
    return;
  }
  require(same_shapes(m_, grads), "Optimizer::step: optimizer state belongs to another net");
  const double c1 = 1.0 - std::pow(p_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(p_.beta2, static_cast<double>(t_));
  const double step = p_.lr * std::sqrt(c2) / c1;
  const double eps = p_.epsilon * std::sqrt(c2);
  auto apply = [&](auto& param, auto& m, auto& v, const auto& g) {
    m = p_.beta1 * m + (1.0 - p_.beta1) * g;
    v = p_.beta2 * v + (1.0 - p_.beta2) * g.cwiseProduct(g);
    param.array() -= step * m.array() / (v.array().sqrt() + eps);
  };
  for (std::size_t i = 0; i < w.size(); ++i) {
    apply(w[i].w, m_[i].w, v_[i].w, grads[i].w);
    apply(w[i].b, m_[i].b, v_[i].b, grads[i].b);
  }
}

}  // namespace risiort::learn
