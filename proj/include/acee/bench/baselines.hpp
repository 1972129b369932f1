#pragma once

#include <string>
#include <vector>

#include "acee/effects/dataset.hpp"

namespace acee::bench {

// mean(Y | D=1) - mean(Y | D=0)
double baseline_diff_means(const effects::ObservationalDataset& dataset);

struct RegAdjustResult {
  double ate_hat = 0.0;
  std::vector<std::string> warnings;
};

// Least-squares fit Y ~ [1, X, D]; the coefficient on D. Singular designs
// fall back to the minimum-norm solution with a warning.
RegAdjustResult baseline_reg_adjust(const effects::ObservationalDataset& dataset);

}  // namespace acee::bench
