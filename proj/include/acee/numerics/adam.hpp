#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "acee/numerics/linalg.hpp"

namespace acee::numerics {

// Adaptive-moment optimizer state over a flat parameter vector.
struct AdamState {
  Vector m;
  Vector v;
  std::int64_t t = 0;

  explicit AdamState(Eigen::Index n) : m(Vector::Zero(n)), v(Vector::Zero(n)) {}
};

// One bias-corrected update in place. Returns false (and leaves params and
// state untouched) when the gradient contains non-finite entries.
inline bool adam_step(AdamState& state, Vector& params, const Vector& grads, double lr,
                      double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8) {
  if (lr <= 0.0) throw std::invalid_argument("adam_step: lr must be positive");
  if (params.size() != grads.size() || params.size() != state.m.size())
    throw std::invalid_argument("adam_step: size mismatch");
  if (!grads.allFinite()) return false;

  state.t += 1;
  state.m = beta1 * state.m + (1.0 - beta1) * grads;
  state.v = beta2 * state.v + (1.0 - beta2) * grads.cwiseProduct(grads);
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(state.t));
  params.array() -=
      lr * (state.m.array() / bc1) / ((state.v.array() / bc2).sqrt() + eps);
  return true;
}

}  // namespace acee::numerics
