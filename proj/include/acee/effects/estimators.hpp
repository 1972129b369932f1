#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "acee/effects/dataset.hpp"
#include "acee/effects/generator.hpp"
#include "acee/effects/knn.hpp"

namespace acee::effects {

struct MuEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

// Mean of M conditional draws Y ~ P(Y | X=x, S=s, D=d) with its Monte Carlo
// standard error.
MuEstimate estimate_mu(const OutcomeGenerator& generator, const numerics::Vector& x,
                       const numerics::Vector& s, int d, Eigen::Index m, numerics::Rng& rng);

struct EstimateOptions {
  Eigen::Index m = 100;          // synthetic draws per response surface
  Eigen::Index n_neighbors = 0;  // 0 -> ceil(n^0.4)
  bool include_self = true;      // a unit may be its own nearest neighbor
  std::uint64_t seed = 0;
  int proxy_rank = -1;  // informational, echoed into the report
};

// Per-unit response surfaces, residuals and both bias-corrected ATE routes.
struct EffectReport {
  numerics::Vector mu0, mu1;        // raw response surfaces
  numerics::Vector mu0_c, mu1_c;    // bias-corrected surfaces
  numerics::Vector tau_unit;        // per-unit ITE
  numerics::Vector tau_unit_c;      // corrected ITE
  numerics::Vector residual;        // Y_i - mu_{D_i}(X_i, S_i)
  Eigen::VectorXi k_count;          // matching counts K_N(i)
  NeighborIndex neighbors;
  double tau_hat = 0.0;             // mean of tau_unit
  double tau_hat_bc = 0.0;          // mean of tau_unit_c
  double tau_hat_bc_closed = 0.0;   // K_N/N closed form; equals tau_hat_bc
  Eigen::Index m = 0;
  Eigen::Index n_neighbors = 0;
  int proxy_rank = -1;
  std::uint64_t seed = 0;
  std::vector<std::string> warnings;
};

// The full estimator: per-unit mu for both arms at every unit, neighbor
// residual correction, and the aggregate ATEs. `proxy_columns` must align
// row-wise with the dataset. Per-unit sampling streams are keyed to the
// unit's content, so permuting rows permutes the per-unit outputs and leaves
// the aggregates unchanged.
EffectReport estimate_effects(const ObservationalDataset& dataset,
                              const numerics::Matrix& proxy_columns,
                              const OutcomeGenerator& generator, const EstimateOptions& options);

struct DagEffectOptions {
  Eigen::Index m = 100;
  std::uint64_t seed = 0;
};

struct DagEffectResult {
  double tau_hat = 0.0;
  numerics::Vector unit_contrasts;
  Eigen::Index m = 0;
  std::uint64_t seed = 0;
};

// Total-effect estimator over a DAG: per unit, the mean contrast of M
// conditional draws of node j with the source clamped to x1 versus x0. The
// two arms share each unit's random draws, so x1 == x0 gives exactly zero.
// `order` is a topological order over the columns of x; the conditioning per
// unit is (s_row_i, x columns preceding k in `order`, source value).
DagEffectResult estimate_dag_total_effect(const numerics::Matrix& x,
                                          const std::vector<int>& order, int k, int j, double x1,
                                          double x0, const numerics::Matrix& residual_proxy,
                                          const DagNodeGenerator& generator,
                                          const DagEffectOptions& options);

}  // namespace acee::effects
