#include "risiort/learn/mlp.hpp"

#include <cmath>
#include <random>
#include <utility>

#include "risiort/error.hpp"

namespace risiort::learn {

namespace {

void check_sizes(const std::vector<int>& sizes) {
  require(sizes.size() >= 2, "Mlp: at least an input and an output size are required");
  for (int s : sizes) require(s >= 1, "Mlp: layer sizes must be >= 1");
}

WeightSet zero_layers(const std::vector<int>& sizes) {
  WeightSet layers;
  for (std::size_t i = 0; i + 1 < sizes.size(); ++i)
    layers.push_back({Eigen::MatrixXd::Zero(sizes[i + 1], sizes[i]), Eigen::VectorXd::Zero(sizes[i + 1])});
  return layers;
}

}  // namespace

Mlp::Mlp(std::vector<int> layer_sizes, OutputActivation output)
    : sizes_(std::move(layer_sizes)), output_(output) {
  check_sizes(sizes_);
  layers_ = zero_layers(sizes_);
}

Mlp::Mlp(std::vector<int> layer_sizes, OutputActivation output, Rng& rng)
    : Mlp(std::move(layer_sizes), output) {
  for (auto& l : layers_) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(l.w.cols()));
    std::uniform_real_distribution<double> u(-bound, bound);
    for (Eigen::Index j = 0; j < l.w.cols(); ++j)
      for (Eigen::Index i = 0; i < l.w.rows(); ++i) l.w(i, j) = u(rng);
  }
}

void Mlp::check_shapes() const {
  require(layers_.size() + 1 == sizes_.size(), "Mlp: layer count does not match layer sizes");
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    require(layers_[i].w.rows() == sizes_[i + 1] && layers_[i].w.cols() == sizes_[i] &&
                layers_[i].b.size() == sizes_[i + 1],
            "Mlp: weight shapes do not match layer sizes");
  }
}

void Mlp::set_weights(WeightSet w) {
  std::swap(layers_, w);
  try {
    check_shapes();
  } catch (...) {
    std::swap(layers_, w);
    throw;
  }
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += static_cast<std::size_t>(l.w.size() + l.b.size());
  return n;
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& x) const {
  require(x.rows() == input_dim(), "Mlp::forward: input dimension mismatch");
  Eigen::MatrixXd h = x;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    Eigen::MatrixXd z = layers_[i].w * h;
    z.colwise() += layers_[i].b;
    if (i + 1 < layers_.size())
      h = z.cwiseMax(0.0);
    else
      h = output_ == OutputActivation::kTanh ? Eigen::MatrixXd(z.array().tanh()) : z;
  }
  return h;
}

Eigen::VectorXd Mlp::forward(const Eigen::VectorXd& x) const {
  return forward(Eigen::MatrixXd(x)).col(0);
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& x, Cache& cache) const {
  require(x.rows() == input_dim(), "Mlp::forward: input dimension mismatch");
  cache.inputs.resize(layers_.size());
  cache.pre.resize(layers_.size());
  Eigen::MatrixXd h = x;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    cache.inputs[i] = h;
    Eigen::MatrixXd z = layers_[i].w * h;
    z.colwise() += layers_[i].b;
    if (i + 1 < layers_.size())
      h = z.cwiseMax(0.0);
    else
      h = output_ == OutputActivation::kTanh ? Eigen::MatrixXd(z.array().tanh()) : z;
    cache.pre[i] = std::move(z);
  }
  cache.output = h;
  return h;
}

Mlp::Gradients Mlp::backward(const Cache& cache, const Eigen::MatrixXd& upstream) const {
  require(cache.pre.size() == layers_.size(), "Mlp::backward: cache does not belong to this net");
  require(upstream.rows() == output_dim() && upstream.cols() == cache.output.cols(),
          "Mlp::backward: upstream gradient dimension mismatch");
  Gradients g;
  g.params.resize(layers_.size());
  Eigen::MatrixXd delta = upstream;
  if (output_ == OutputActivation::kTanh)
    delta = delta.cwiseProduct((1.0 - cache.output.array().square()).matrix());
  for (std::size_t i = layers_.size(); i-- > 0;) {
    g.params[i].w = delta * cache.inputs[i].transpose();
    g.params[i].b = delta.rowwise().sum();
    Eigen::MatrixXd down = layers_[i].w.transpose() * delta;
    if (i > 0)
      delta = (cache.pre[i - 1].array() > 0.0).select(down, 0.0);
    else
      g.dx = std::move(down);
  }
  return g;
}

WeightSet zeros_like(const WeightSet& w) {
  WeightSet z;
  z.reserve(w.size());
  for (const auto& l : w)
    z.push_back({Eigen::MatrixXd::Zero(l.w.rows(), l.w.cols()), Eigen::VectorXd::Zero(l.b.size())});
  return z;
}

bool same_shapes(const WeightSet& a, const WeightSet& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].w.rows() != b[i].w.rows() || a[i].w.cols() != b[i].w.cols() ||
        a[i].b.size() != b[i].b.size())
      return false;
  return true;
}

void soft_update(Mlp& target, const Mlp& online, double tau) {
  require(tau >= 0.0 && tau <= 1.0, "soft_update: tau must lie in [0, 1]");
  require(same_shapes(target.weights(), online.weights()), "soft_update: shape mismatch");
  auto& t = target.weights();
  const auto& o = online.weights();
  for (std::size_t i = 0; i < t.size(); ++i) {
    t[i].w = (1.0 - tau) * t[i].w + tau * o[i].w;
    t[i].b = (1.0 - tau) * t[i].b + tau * o[i].b;
  }
}

WeightSet regression_gradient(const Mlp& net, const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                              double* loss) {
  require(net.output_dim() == 1, "regression_gradient: single-output net required");
  require(y.size() == x.cols(), "regression_gradient: one target per sample required");
  Mlp::Cache cache;
  const Eigen::MatrixXd q = net.forward(x, cache);
  const auto n = static_cast<double>(x.cols());
  const Eigen::RowVectorXd diff = q.row(0) - y.transpose();
  if (loss) *loss = 0.5 * diff.squaredNorm() / n;
  return net.backward(cache, diff / n).params;
}

Eigen::MatrixXd vstack(std::initializer_list<const Eigen::MatrixXd*> parts) {
  Eigen::Index rows = 0;
  Eigen::Index cols = -1;
  for (const auto* p : parts) {
    if (p->rows() == 0) continue;
    require(cols < 0 || p->cols() == cols, "vstack: column count mismatch");
    cols = p->cols();
    rows += p->rows();
  }
  Eigen::MatrixXd out(rows, cols < 0 ? 0 : cols);
  Eigen::Index r = 0;
  for (const auto* p : parts) {
    if (p->rows() == 0) continue;
    out.middleRows(r, p->rows()) = *p;
    r += p->rows();
  }
  return out;
}

}  // namespace risiort::learn
