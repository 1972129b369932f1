#pragma once

#include "acee/numerics/linalg.hpp"
#include "acee/numerics/rng.hpp"

namespace acee::effects {

// Conditional outcome generator: m draws of Y given covariates x, proxy
// columns s and treatment arm d. Implementations must be deterministic given
// the rng state and safe to call concurrently on distinct rngs.
class OutcomeGenerator {
 public:
  virtual ~OutcomeGenerator() = default;
  virtual numerics::Vector draw(const numerics::Vector& x, const numerics::Vector& s, int d,
                                Eigen::Index m, numerics::Rng& rng) const = 0;
};

// Conditional node generator for the DAG estimator: m draws of the target
// node given the unit's proxy row, its predecessor values and a clamped
// source value.
class DagNodeGenerator {
 public:
  virtual ~DagNodeGenerator() = default;
  virtual numerics::Vector draw(const numerics::Vector& s_row, const numerics::Vector& x_kminus,
                                double x_k, Eigen::Index m, numerics::Rng& rng) const = 0;
};

}  // namespace acee::effects
