#pragma once

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace acee::diffusion {

// Variance-preserving OU forward process dX = -X/2 dtau + dW:
// alpha(tau) = e^{-tau/2}, sigma^2(tau) = 1 - e^{-tau}, alpha^2 + sigma^2 = 1.
struct Schedule {
  double tau_min = 1e-3;
  double tau_max = 5.0;
  Eigen::Index steps = 100;

  double alpha(double tau) const { return std::exp(-0.5 * tau); }
  double sigma2(double tau) const { return -std::expm1(-tau); }
  double sigma(double tau) const { return std::sqrt(sigma2(tau)); }

  bool contains(double tau) const { return tau >= tau_min && tau <= tau_max; }

  void validate() const {
    if (!(tau_min > 0.0) || !(tau_min < tau_max))
      throw std::invalid_argument("Schedule: need 0 < tau_min < tau_max");
    if (steps < 2) throw std::invalid_argument("Schedule: need at least 2 sampler steps");
  }
};

}  // namespace acee::diffusion
