#pragma once

#include <memory>
#include <vector>

#include "acee/effects/generator.hpp"
#include "acee/scm/scm.hpp"

namespace acee::effects {

// Draws Y from its true structural mechanism given (x, d), ignoring the
// proxy. Only valid when every parent of the outcome is an observed
// covariate or the treatment, i.e. the conditional law is available exactly.
class ScmOutcomeOracle : public OutcomeGenerator {
 public:
  explicit ScmOutcomeOracle(scm::Scm model);

  numerics::Vector draw(const numerics::Vector& x, const numerics::Vector& s, int d,
                        Eigen::Index m, numerics::Rng& rng) const override;

 private:
  scm::Scm model_;
  std::vector<int> parent_covariate_slot_;  // per outcome parent: covariate column or -1 for D
};

// Adds a constant offset to one arm's draws; used to exercise the bias
// correction against a deliberately miscalibrated generator.
class ShiftedOutcomeGenerator : public OutcomeGenerator {
 public:
  ShiftedOutcomeGenerator(const OutcomeGenerator& inner, double shift_control,
                          double shift_treated)
      : inner_(inner), shift_{shift_control, shift_treated} {}

  numerics::Vector draw(const numerics::Vector& x, const numerics::Vector& s, int d,
                        Eigen::Index m, numerics::Rng& rng) const override {
    return inner_.draw(x, s, d, m, rng).array() + shift_[d];
  }

 private:
  const OutcomeGenerator& inner_;
  double shift_[2];
};

// True conditional generator of node j given its predecessors: clamps the
// predecessor columns and the source node, then forward-simulates the rest
// of the SCM. Requires a fully observed model.
class ScmDagOracle : public DagNodeGenerator {
 public:
  ScmDagOracle(scm::Scm model, std::vector<int> order, int source, int target);

  numerics::Vector draw(const numerics::Vector& s_row, const numerics::Vector& x_kminus,
                        double x_k, Eigen::Index m, numerics::Rng& rng) const override;

 private:
  scm::Scm model_;
  std::vector<int> order_;
  int source_;
  int target_;
  Eigen::Index pos_source_;
};

}  // namespace acee::effects
