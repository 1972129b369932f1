#pragma once

#include <string>
#include <vector>

#include "acee/numerics/linalg.hpp"

namespace acee::effects {

// Covariates X (n x p), binary treatment D and outcome Y for n units.
struct ObservationalDataset {
  numerics::Matrix x;
  Eigen::VectorXi d;
  numerics::Vector y;
  std::vector<std::string> column_names;  // optional, size p when present

  Eigen::Index n() const { return x.rows(); }
  Eigen::Index p() const { return x.cols(); }

  Eigen::Index arm_size(int arm) const {
    Eigen::Index c = 0;
    for (Eigen::Index i = 0; i < d.size(); ++i)
      if (d[i] == arm) ++c;
    return c;
  }

  // Enforced before any treatment-effect estimation: consistent lengths,
  // D in {0,1}, both arms non-empty, everything finite.
  void validate_for_effects() const;
};

}  // namespace acee::effects
