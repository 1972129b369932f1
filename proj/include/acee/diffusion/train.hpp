#pragma once

#include <cstdint>
#include <vector>

#include "acee/diffusion/score_model.hpp"

namespace acee::diffusion {

struct TrainConfig {
  Eigen::Index epochs = 2000;
  Eigen::Index batch_size = 128;
  double learning_rate = 1e-3;
  Eigen::Index time_draws = 1;
  LossWeighting weighting = LossWeighting::Sigma2;
  std::uint64_t seed = 0;

  void validate() const;
};

struct TrainReport {
  std::vector<double> epoch_loss;  // per-epoch average training loss

  double initial() const { return epoch_loss.empty() ? 0.0 : epoch_loss.front(); }
  double final_loss() const { return epoch_loss.empty() ? 0.0 : epoch_loss.back(); }
};

// Joint source-stage training of embedding and head. Standardization stats
// are (re)computed from the given rows. Aborts when the loss diverges past
// 1e3 x the first epoch's average.
TrainReport pretrain_source(ScoreModel& model, const Matrix& cond, const Vector& y,
                            const TrainConfig& config);

// Target-stage training of the head only; the embedding parameters are
// bit-identical before and after. Standardization stats switch to the
// target rows.
TrainReport finetune_target(ScoreModel& model, const Matrix& cond, const Vector& y,
                            const TrainConfig& config);

// Single-stage convenience: train everything on one dataset.
TrainReport train(ScoreModel& model, const Matrix& cond, const Vector& y,
                  const TrainConfig& config);

}  // namespace acee::diffusion
