#pragma once

#include <vector>

#include "acee/numerics/linalg.hpp"
#include "acee/numerics/rng.hpp"

namespace acee::numerics {

struct MlpGradients {
  std::vector<Matrix> dw;
  std::vector<Vector> db;
  Matrix dinput;  // batch x input_dim, gradient w.r.t. the inputs

  Vector flat() const;
};

// Dense feed-forward network, ReLU on hidden layers, identity output.
// Weights are stored as W[l] of shape dims[l+1] x dims[l]; a batch is one row
// per example, so a layer computes X W^T + 1 b^T.
class Mlp {
 public:
  Mlp() = default;
  explicit Mlp(std::vector<Eigen::Index> dims);

  // He-normal weights, zero biases
  void init_random(Rng& rng);

  const std::vector<Eigen::Index>& dims() const { return dims_; }
  Eigen::Index input_dim() const { return dims_.front(); }
  Eigen::Index output_dim() const { return dims_.back(); }
  Eigen::Index parameter_count() const;

  std::vector<Matrix>& weights() { return w_; }
  std::vector<Vector>& biases() { return b_; }
  const std::vector<Matrix>& weights() const { return w_; }
  const std::vector<Vector>& biases() const { return b_; }

  Vector forward(const Vector& input) const;
  Matrix forward_batch(const Matrix& inputs) const;

  // Gradient of <output, output_grad> w.r.t. every parameter and the input.
  MlpGradients backward(const Vector& input, const Vector& output_grad) const;
  // Batched: gradients are summed over the batch rows.
  MlpGradients backward_batch(const Matrix& inputs, const Matrix& output_grads) const;

  Vector params_flat() const;
  void set_params_flat(const Vector& flat);

  bool operator==(const Mlp& other) const;

 private:
  std::vector<Eigen::Index> dims_;
  std::vector<Matrix> w_;
  std::vector<Vector> b_;
};

}  // namespace acee::numerics
