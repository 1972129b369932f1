#pragma once

#include <optional>
#include <vector>

#include "acee/numerics/linalg.hpp"

namespace acee::effects {

// Exact N nearest neighbors of `query` among rows of `points` whose arm
// label equals `arm`, by Euclidean distance, ties broken by lowest index.
// `exclude` removes one candidate row (used to drop a unit from its own
// neighborhood). Result is ordered by (distance, index).
std::vector<int> knn_query(const numerics::Matrix& points, const Eigen::VectorXi& arms,
                           const numerics::Vector& query, int arm, Eigen::Index n_neighbors,
                           std::optional<int> exclude = std::nullopt);

// Neighbor sets of every unit in both arms plus the matching counts
// K_N(i) = #{j : i in J^{D_i}(j)}. Set sizes are clipped per arm so that
// |J^d| is the same for every query unit, which keeps the closed-form
// bias-corrected estimator an exact identity.
struct NeighborIndex {
  std::vector<std::vector<int>> neighbors0;
  std::vector<std::vector<int>> neighbors1;
  std::vector<int> k_count;
  Eigen::Index n_effective[2] = {0, 0};
  bool clipped = false;

  const std::vector<std::vector<int>>& arm_sets(int arm) const {
    return arm == 0 ? neighbors0 : neighbors1;
  }
};

NeighborIndex build_neighbor_index(const numerics::Matrix& points, const Eigen::VectorXi& arms,
                                   Eigen::Index n_neighbors, bool include_self);

}  // namespace acee::effects
