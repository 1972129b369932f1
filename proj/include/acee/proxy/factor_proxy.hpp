#pragma once

#include <string>
#include <vector>

#include "acee/effects/dataset.hpp"
#include "acee/numerics/linalg.hpp"
#include "acee/numerics/rng.hpp"

namespace acee::proxy {

// Latent-confounder proxy from the constrained least-squares factor
// decomposition of the stacked data matrix Z = [X | D | Y]. Columns are
// centered and scaled to unit variance before the rank-q fit; phi/psi and
// s_hat_std live on that standardized scale (where the constraints
// (1/n) phi' phi = I and psi' psi diagonal hold), while s_hat is mapped back
// to the original column scales for downstream use.
struct FactorProxy {
  Eigen::Index q = 0;
  numerics::Matrix phi_hat;    // n x q
  numerics::Matrix psi_hat;    // d x q
  numerics::Matrix s_hat_std;  // n x d, equals phi_hat * psi_hat^T
  numerics::Matrix s_hat;      // n x d, original scale
  numerics::Matrix z_std;      // n x d, the standardized stacked data
  std::vector<std::string> column_names;
  int d_col = -1;  // column of the stacked matrix holding D, -1 if excluded
  int y_col = -1;
  numerics::Vector col_mean;
  numerics::Vector col_scale;
  numerics::Vector singular_values;  // all min(n,d) values, for q heuristics
  std::vector<std::string> warnings;

  numerics::Vector s_y() const;            // proxy column for Y
  numerics::Matrix s_minus_y() const;      // remaining proxy columns
  numerics::Matrix proxy_columns() const;  // s_hat as used by estimators
};

struct IncludeFlags {
  bool x = true;
  bool d = true;
  bool y = true;
};

FactorProxy fit_factor_proxy(const effects::ObservationalDataset& dataset, Eigen::Index q,
                             IncludeFlags include = {});

// Residual-style proxy of the DAG setting: X minus its rank-q reconstruction.
struct ResidualProxy {
  Eigen::Index q = 0;
  numerics::Matrix s_hat_resid;     // n x p
  numerics::Matrix reconstruction;  // n x p, s_hat_resid + reconstruction = X
};

ResidualProxy fit_residual_proxy(const numerics::Matrix& x, Eigen::Index q);

// Checks whether the outcome residual Y - S_Y still carries signal about the
// estimated S_Y after linearly adjusting both for (X, S_{-Y}, D). Small
// p-values flag a proxy-sufficiency violation.
struct DiagnosticResult {
  double statistic = 0.0;
  double p_value = 1.0;
  Eigen::Index permutations = 0;
  std::vector<std::string> warnings;
};

DiagnosticResult proxy_sufficiency_diagnostic(const effects::ObservationalDataset& dataset,
                                              const FactorProxy& proxy, Eigen::Index permutations,
                                              numerics::Rng& rng);

}  // namespace acee::proxy
