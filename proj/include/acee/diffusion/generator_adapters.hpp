#pragma once

#include <stdexcept>

#include "acee/diffusion/score_model.hpp"
#include "acee/effects/generator.hpp"

namespace acee::diffusion {

// Treatment-effect conditioning: cond = [x | s | d].
class ScoreModelOutcomeGenerator : public effects::OutcomeGenerator {
 public:
  explicit ScoreModelOutcomeGenerator(const ScoreModel& model) : model_(model) {
    if (!model_.layout().has_treatment)
      throw std::invalid_argument("outcome generator needs a treatment slot in the layout");
  }

  Vector draw(const Vector& x, const Vector& s, int d, Eigen::Index m,
              numerics::Rng& rng) const override {
    const auto& lay = model_.layout();
    if (x.size() != lay.x_dim || s.size() != lay.s_dim)
      throw std::invalid_argument("outcome generator: conditioning dims mismatch");
    Vector cond(lay.dim());
    cond << x, s, static_cast<double>(d);
    return model_.sample(cond, m, rng);
  }

 private:
  const ScoreModel& model_;
};

// DAG conditioning: cond = [x_{k^-} | x_k | s].
class ScoreModelDagGenerator : public effects::DagNodeGenerator {
 public:
  explicit ScoreModelDagGenerator(const ScoreModel& model) : model_(model) {
    if (model_.layout().has_treatment)
      throw std::invalid_argument("dag generator expects a layout without a treatment slot");
  }

  Vector draw(const Vector& s_row, const Vector& x_kminus, double x_k, Eigen::Index m,
              numerics::Rng& rng) const override {
    const auto& lay = model_.layout();
    if (x_kminus.size() + 1 != lay.x_dim || s_row.size() != lay.s_dim)
      throw std::invalid_argument("dag generator: conditioning dims mismatch");
    Vector cond(lay.dim());
    cond << x_kminus, x_k, s_row;
    return model_.sample(cond, m, rng);
  }

 private:
  const ScoreModel& model_;
};

}  // namespace acee::diffusion
