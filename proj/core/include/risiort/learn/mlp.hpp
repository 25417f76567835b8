#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

#include <Eigen/Dense>

#include "risiort/random.hpp"

namespace risiort::learn {

enum class OutputActivation { kLinear, kTanh };

// Dense layer y = W x + b, W is out x in.
struct Layer {
  Eigen::MatrixXd w;
  Eigen::VectorXd b;

  friend bool operator==(const Layer& a, const Layer& b) {
    return a.w.rows() == b.w.rows() && a.w.cols() == b.w.cols() && a.b.size() == b.b.size() &&
           a.w == b.w && a.b == b.b;
  }
};

using WeightSet = std::vector<Layer>;

// Batched data is column-major: one sample per column.
class Mlp {
 public:
  struct Cache {
    std::vector<Eigen::MatrixXd> inputs;  // input of every layer
    std::vector<Eigen::MatrixXd> pre;     // pre-activation of every layer
    Eigen::MatrixXd output;
  };

  struct Gradients {
    WeightSet params;    // same shapes as the layers
    Eigen::MatrixXd dx;  // gradient with respect to the input batch
  };

  Mlp() = default;
  // Zero weights and biases.
  Mlp(std::vector<int> layer_sizes, OutputActivation output);
  // Uniform(+-1/sqrt(fan_in)) weights, zero biases.
  Mlp(std::vector<int> layer_sizes, OutputActivation output, Rng& rng);

  int input_dim() const { return sizes_.front(); }
  int output_dim() const { return sizes_.back(); }
  const std::vector<int>& layer_sizes() const { return sizes_; }
  OutputActivation output_activation() const { return output_; }

  const WeightSet& weights() const { return layers_; }
  WeightSet& weights() { return layers_; }
  void set_weights(WeightSet w);
  std::size_t parameter_count() const;

  Eigen::MatrixXd forward(const Eigen::MatrixXd& x) const;
  Eigen::VectorXd forward(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd forward(const Eigen::MatrixXd& x, Cache& cache) const;

  // Reverse pass of a scalar loss whose gradient at the output is `upstream`.
  Gradients backward(const Cache& cache, const Eigen::MatrixXd& upstream) const;

 private:
  void check_shapes() const;

  std::vector<int> sizes_;
  OutputActivation output_ = OutputActivation::kLinear;
  WeightSet layers_;
};

// Shape-compatible zero gradient buffer.
WeightSet zeros_like(const WeightSet& w);
bool same_shapes(const WeightSet& a, const WeightSet& b);

// target = (1 - tau) target + tau online, elementwise.
void soft_update(Mlp& target, const Mlp& online, double tau);

// Gradient of mean 0.5 (q(x) - y)^2 for a single-output net and fixed
// targets y, one per column of x.
WeightSet regression_gradient(const Mlp& net, const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                              double* loss = nullptr);

// Stacks the rows of the given batches into one input batch.
Eigen::MatrixXd vstack(std::initializer_list<const Eigen::MatrixXd*> parts);

}  // namespace risiort::learn
