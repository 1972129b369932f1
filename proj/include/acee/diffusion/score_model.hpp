#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "acee/diffusion/schedule.hpp"
#include "acee/numerics/linalg.hpp"
#include "acee/numerics/mlp.hpp"
#include "acee/numerics/rng.hpp"

namespace acee::diffusion {

using numerics::Matrix;
using numerics::Vector;

// Order of the conditioning vector: [X block | S block | D], matching how it
// is assembled at sampling time. Recorded in checkpoints.
struct ConditioningLayout {
  Eigen::Index x_dim = 0;
  Eigen::Index s_dim = 0;
  bool has_treatment = false;

  Eigen::Index dim() const { return x_dim + s_dim + (has_treatment ? 1 : 0); }
};

// One diffusion perturbation y_tau = alpha y0 + sigma eps with the exact
// transition score -eps / sigma as target.
struct Perturbed {
  double y_tau = 0.0;
  double score_target = 0.0;
};

Perturbed forward_perturb(double y0, double tau, const Schedule& schedule, numerics::Rng& rng);

// Conditional score network: a shared embedding h(cond) feeding a scalar
// head. The head predicts eps, so the score is -eps_hat / sigma(tau). Both
// nets operate on standardized inputs; samples are de-standardized on the
// way out. Time enters the head as the feature pair (tau, e^{-tau/2}).
class ScoreModel {
 public:
  ScoreModel() = default;
  ScoreModel(ConditioningLayout layout, Eigen::Index embed_dim,
             const std::vector<Eigen::Index>& embed_hidden,
             const std::vector<Eigen::Index>& head_hidden, Schedule schedule,
             std::uint64_t init_seed);

  // Defaults from the module: embed 2x64 -> 16, head 3x128.
  static ScoreModel with_defaults(ConditioningLayout layout, Schedule schedule,
                                  std::uint64_t init_seed);

  const ConditioningLayout& layout() const { return layout_; }
  const Schedule& schedule() const { return schedule_; }
  Eigen::Index embed_dim() const { return embed_.output_dim(); }

  numerics::Mlp& embed() { return embed_; }
  numerics::Mlp& head() { return head_; }
  const numerics::Mlp& embed() const { return embed_; }
  const numerics::Mlp& head() const { return head_; }

  void set_standardization(Vector cond_mean, Vector cond_scale, double y_mean, double y_scale);
  void standardize_from(const Matrix& cond, const Vector& y);
  const Vector& cond_mean() const { return cond_mean_; }
  const Vector& cond_scale() const { return cond_scale_; }
  double y_mean() const { return y_mean_; }
  double y_scale() const { return y_scale_; }

  Matrix standardize_cond(const Matrix& cond) const;

  // h rows for standardized conditioning rows
  Matrix embed_batch(const Matrix& cond_std) const { return embed_.forward_batch(cond_std); }

  // eps-prediction for standardized states z (one row per draw) sharing a
  // single conditioning embedding h and time tau
  Vector eps_hat(const Vector& z, const Vector& h, double tau) const;

  // model score at a standardized outcome value (diagnostics / tests)
  double score_std(double y_std, const Vector& cond_raw, double tau) const;

  // m draws of Y given the raw conditioning vector: Euler-Maruyama
  // integration of the reverse SDE from tau_max down to tau_min, initial
  // state N(0,1), de-standardized outputs
  Vector sample(const Vector& cond_raw, Eigen::Index m, numerics::Rng& rng) const;

  bool same_embedding(const ScoreModel& other) const { return embed_ == other.embed_; }

  std::string to_json() const;
  static ScoreModel from_json(const std::string& text);
  void save(const std::string& path) const;
  static ScoreModel load(const std::string& path);

 private:
  Matrix head_input(const Vector& z, const Vector& h, double tau) const;

  ConditioningLayout layout_;
  Schedule schedule_;
  numerics::Mlp embed_;
  numerics::Mlp head_;
  Vector cond_mean_;
  Vector cond_scale_;
  double y_mean_ = 0.0;
  double y_scale_ = 1.0;
};

enum class LossWeighting {
  Sigma2,      // eps-prediction form, bounded per-sample variance (default)
  Unweighted,  // raw score-matching objective
};

struct DsmBatchResult {
  double loss = 0.0;
  numerics::MlpGradients embed_grads;
  numerics::MlpGradients head_grads;
};

// Monte Carlo denoising score-matching loss over a batch, with exact
// gradients for both networks. Inputs are raw; standardization is applied
// using the model's stored stats. One (tau, eps) pair is drawn per example
// and time draw.
DsmBatchResult dsm_loss(const ScoreModel& model, const Matrix& cond, const Vector& y,
                        Eigen::Index time_draws, LossWeighting weighting, numerics::Rng& rng);

}  // namespace acee::diffusion
