#include "acee/bench/baselines.hpp"

#include <stdexcept>

#include "acee/numerics/linalg.hpp"

namespace acee::bench {

double baseline_diff_means(const effects::ObservationalDataset& dataset) {
  dataset.validate_for_effects();
  double sum1 = 0.0, sum0 = 0.0;
  Eigen::Index n1 = 0, n0 = 0;
  for (Eigen::Index i = 0; i < dataset.n(); ++i) {
    if (dataset.d[i] == 1) {
      sum1 += dataset.y[i];
      ++n1;
    } else {
      sum0 += dataset.y[i];
      ++n0;
    }
  }
  return sum1 / static_cast<double>(n1) - sum0 / static_cast<double>(n0);
}

RegAdjustResult baseline_reg_adjust(const effects::ObservationalDataset& dataset) {
  dataset.validate_for_effects();
  if (dataset.n() <= dataset.p() + 2)
    throw std::invalid_argument("baseline_reg_adjust: need n > p + 2");

  numerics::Matrix design(dataset.n(), dataset.p() + 2);
  design.col(0).setOnes();
  design.middleCols(1, dataset.p()) = dataset.x;
  design.col(dataset.p() + 1) = dataset.d.cast<double>();

  const auto fit = numerics::least_squares(design, dataset.y);
  RegAdjustResult out;
  out.ate_hat = fit.coef[dataset.p() + 1];
  if (fit.rank_deficient)
    out.warnings.push_back("singular design matrix; minimum-norm pseudo-inverse used");
  return out;
}

}  // namespace acee::bench
