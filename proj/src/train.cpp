#include "acee/diffusion/train.hpp"

#include <numeric>
#include <stdexcept>

#include "acee/numerics/adam.hpp"

namespace acee::diffusion {

void TrainConfig::validate() const {
  if (epochs < 0) throw std::invalid_argument("TrainConfig: negative epochs");
  if (batch_size < 1) throw std::invalid_argument("TrainConfig: batch size must be >= 1");
  if (learning_rate <= 0.0) throw std::invalid_argument("TrainConfig: learning rate must be > 0");
  if (time_draws < 1) throw std::invalid_argument("TrainConfig: time draws must be >= 1");
}

namespace {

TrainReport run_training(ScoreModel& model, const Matrix& cond, const Vector& y,
                         const TrainConfig& config, bool update_embedding) {
  config.validate();
  if (cond.rows() != y.size() || cond.rows() < 1)
    throw std::invalid_argument("training: empty or mismatched data");
  if (cond.rows() < config.batch_size)
    throw std::invalid_argument("training: fewer rows than one batch");

  model.standardize_from(cond, y);

  numerics::Rng rng(config.seed, 0x7a41);
  numerics::AdamState head_state(model.head().parameter_count());
  numerics::AdamState embed_state(model.embed().parameter_count());
  Vector head_params = model.head().params_flat();
  Vector embed_params = model.embed().params_flat();

  const Eigen::Index n = cond.rows();
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);

  // pre-training loss anchors the divergence guard
  double baseline = 0.0;
  {
    numerics::Rng probe = rng.substream(0xbead);
    const Eigen::Index rows = std::min<Eigen::Index>(n, 512);
    baseline = dsm_loss(model, cond.topRows(rows), y.head(rows), config.time_draws,
                        config.weighting, probe)
                   .loss;
  }
  const double abort_at = 1e3 * std::max(baseline, 1e-6);

  TrainReport report;
  report.epoch_loss.reserve(config.epochs);
  for (Eigen::Index epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    double loss_sum = 0.0;
    Eigen::Index batches = 0;
    for (Eigen::Index start = 0; start + config.batch_size <= n; start += config.batch_size) {
      Matrix cond_batch(config.batch_size, cond.cols());
      Vector y_batch(config.batch_size);
      for (Eigen::Index r = 0; r < config.batch_size; ++r) {
        cond_batch.row(r) = cond.row(order[start + r]);
        y_batch[r] = y[order[start + r]];
      }

      const DsmBatchResult res =
          dsm_loss(model, cond_batch, y_batch, config.time_draws, config.weighting, rng);
      if (res.loss > abort_at)
        throw std::runtime_error("training: loss diverged (over 1e3 x initial)");
      loss_sum += res.loss;
      ++batches;

      if (!numerics::adam_step(head_state, head_params, res.head_grads.flat(),
                               config.learning_rate))
        throw std::runtime_error("training: non-finite head gradient");
      model.head().set_params_flat(head_params);
      if (update_embedding) {
        if (!numerics::adam_step(embed_state, embed_params, res.embed_grads.flat(),
                                 config.learning_rate))
          throw std::runtime_error("training: non-finite embedding gradient");
        model.embed().set_params_flat(embed_params);
      }
    }
    const double epoch_loss = batches > 0 ? loss_sum / static_cast<double>(batches) : 0.0;
    report.epoch_loss.push_back(epoch_loss);
  }
  return report;
}

}  // namespace

TrainReport pretrain_source(ScoreModel& model, const Matrix& cond, const Vector& y,
                            const TrainConfig& config) {
  return run_training(model, cond, y, config, /*update_embedding=*/true);
}

TrainReport finetune_target(ScoreModel& model, const Matrix& cond, const Vector& y,
                            const TrainConfig& config) {
  return run_training(model, cond, y, config, /*update_embedding=*/false);
}

TrainReport train(ScoreModel& model, const Matrix& cond, const Vector& y,
                  const TrainConfig& config) {
  return run_training(model, cond, y, config, /*update_embedding=*/true);
}

}  // namespace acee::diffusion
