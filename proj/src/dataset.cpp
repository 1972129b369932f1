#include "acee/effects/dataset.hpp"

#include <stdexcept>

namespace acee::effects {

void ObservationalDataset::validate_for_effects() const {
  if (x.rows() != d.size() || x.rows() != y.size())
    throw std::invalid_argument("dataset: X, D, Y lengths disagree");
  if (x.rows() == 0) throw std::invalid_argument("dataset: empty");
  if (!x.allFinite() || !y.allFinite())
    throw std::invalid_argument("dataset: non-finite values");
  Eigen::Index treated = 0;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (d[i] != 0 && d[i] != 1)
      throw std::invalid_argument("dataset: treatment outside {0,1} at row " + std::to_string(i));
    treated += d[i];
  }
  if (treated == 0 || treated == d.size())
    throw std::invalid_argument("dataset: one treatment arm is empty");
  if (!column_names.empty() && static_cast<Eigen::Index>(column_names.size()) != x.cols())
    throw std::invalid_argument("dataset: column name count mismatch");
}

}  // namespace acee::effects
