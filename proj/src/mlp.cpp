#include "acee/numerics/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace acee::numerics {

Mlp::Mlp(std::vector<Eigen::Index> dims) : dims_(std::move(dims)) {
  if (dims_.size() < 2) throw std::invalid_argument("Mlp: need at least input and output dims");
  for (Eigen::Index d : dims_)
    if (d <= 0) throw std::invalid_argument("Mlp: nonpositive layer dim");
  for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
    w_.emplace_back(Matrix::Zero(dims_[l + 1], dims_[l]));
    b_.emplace_back(Vector::Zero(dims_[l + 1]));
  }
}

void Mlp::init_random(Rng& rng) {
  for (std::size_t l = 0; l < w_.size(); ++l) {
    const double sd = std::sqrt(2.0 / static_cast<double>(dims_[l]));
    w_[l] = rng.normal_matrix(w_[l].rows(), w_[l].cols(), 0.0, sd);
    b_[l].setZero();
  }
}

Eigen::Index Mlp::parameter_count() const {
  Eigen::Index n = 0;
  for (std::size_t l = 0; l < w_.size(); ++l) n += w_[l].size() + b_[l].size();
  return n;
}

Vector Mlp::forward(const Vector& input) const {
  if (input.size() != input_dim()) throw std::invalid_argument("Mlp::forward: input dim mismatch");
  Vector a = input;
  for (std::size_t l = 0; l < w_.size(); ++l) {
    a = (w_[l] * a + b_[l]).eval();
    if (l + 1 < w_.size()) a = a.cwiseMax(0.0);
  }
  return a;
}

Matrix Mlp::forward_batch(const Matrix& inputs) const {
  if (inputs.cols() != input_dim())
    throw std::invalid_argument("Mlp::forward_batch: input dim mismatch");
  Matrix a = inputs;
  for (std::size_t l = 0; l < w_.size(); ++l) {
    a = ((a * w_[l].transpose()).rowwise() + b_[l].transpose()).eval();
    if (l + 1 < w_.size()) a = a.cwiseMax(0.0);
  }
  return a;
}

MlpGradients Mlp::backward(const Vector& input, const Vector& output_grad) const {
  Matrix in(1, input.size());
  in.row(0) = input;
  Matrix og(1, output_grad.size());
  og.row(0) = output_grad;
  return backward_batch(in, og);
}

MlpGradients Mlp::backward_batch(const Matrix& inputs, const Matrix& output_grads) const {
  if (inputs.cols() != input_dim() || output_grads.cols() != output_dim() ||
      inputs.rows() != output_grads.rows())
    throw std::invalid_argument("Mlp::backward_batch: shape mismatch");

  const std::size_t nlayers = w_.size();
  std::vector<Matrix> acts(nlayers + 1);  // post-activation values per layer
  acts[0] = inputs;
  for (std::size_t l = 0; l < nlayers; ++l) {
    acts[l + 1] = ((acts[l] * w_[l].transpose()).rowwise() + b_[l].transpose()).eval();
    if (l + 1 < nlayers) acts[l + 1] = acts[l + 1].cwiseMax(0.0);
  }

  MlpGradients g;
  g.dw.resize(nlayers);
  g.db.resize(nlayers);
  Matrix delta = output_grads;  // batch x dims[l+1]
  for (std::size_t l = nlayers; l-- > 0;) {
    if (l + 1 < nlayers) {
      // ReLU mask: derivative 0 where the pre-activation was clipped
      delta = delta.cwiseProduct((acts[l + 1].array() > 0.0).cast<double>().matrix());
    }
    g.dw[l] = delta.transpose() * acts[l];
    g.db[l] = delta.colwise().sum().transpose();
    delta = (delta * w_[l]).eval();
  }
  g.dinput = delta;
  return g;
}

Vector MlpGradients::flat() const {
  Eigen::Index n = 0;
  for (std::size_t l = 0; l < dw.size(); ++l) n += dw[l].size() + db[l].size();
  Vector out(n);
  Eigen::Index at = 0;
  for (std::size_t l = 0; l < dw.size(); ++l) {
    out.segment(at, dw[l].size()) = Eigen::Map<const Vector>(dw[l].data(), dw[l].size());
    at += dw[l].size();
    out.segment(at, db[l].size()) = db[l];
    at += db[l].size();
  }
  return out;
}

Vector Mlp::params_flat() const {
  Vector out(parameter_count());
  Eigen::Index at = 0;
  for (std::size_t l = 0; l < w_.size(); ++l) {
    out.segment(at, w_[l].size()) = Eigen::Map<const Vector>(w_[l].data(), w_[l].size());
    at += w_[l].size();
    out.segment(at, b_[l].size()) = b_[l];
    at += b_[l].size();
  }
  return out;
}

void Mlp::set_params_flat(const Vector& flat) {
  if (flat.size() != parameter_count())
    throw std::invalid_argument("Mlp::set_params_flat: size mismatch");
  Eigen::Index at = 0;
  for (std::size_t l = 0; l < w_.size(); ++l) {
    Eigen::Map<Vector>(w_[l].data(), w_[l].size()) = flat.segment(at, w_[l].size());
    at += w_[l].size();
    b_[l] = flat.segment(at, b_[l].size());
    at += b_[l].size();
  }
}

bool Mlp::operator==(const Mlp& other) const {
  if (dims_ != other.dims_) return false;
  for (std::size_t l = 0; l < w_.size(); ++l) {
    if ((w_[l].array() != other.w_[l].array()).any()) return false;
    if ((b_[l].array() != other.b_[l].array()).any()) return false;
  }
  return true;
}

}  // namespace acee::numerics
