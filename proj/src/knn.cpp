#include "acee/effects/knn.hpp"

#include <algorithm>
#include <stdexcept>

namespace acee::effects {

std::vector<int> knn_query(const numerics::Matrix& points, const Eigen::VectorXi& arms,
                           const numerics::Vector& query, int arm, Eigen::Index n_neighbors,
                           std::optional<int> exclude) {
  if (points.rows() != arms.size()) throw std::invalid_argument("knn_query: label length mismatch");
  if (points.cols() != query.size()) throw std::invalid_argument("knn_query: query dim mismatch");

  std::vector<std::pair<double, int>> candidates;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    if (arms[i] != arm) continue;
    if (exclude && *exclude == i) continue;
    candidates.emplace_back((points.row(i).transpose() - query).squaredNorm(),
                            static_cast<int>(i));
  }
  if (candidates.empty()) throw std::invalid_argument("knn_query: arm is empty");

  const std::size_t keep =
      std::min(static_cast<std::size_t>(n_neighbors), candidates.size());
  std::partial_sort(candidates.begin(), candidates.begin() + keep, candidates.end());

  std::vector<int> out;
  out.reserve(keep);
  for (std::size_t r = 0; r < keep; ++r) out.push_back(candidates[r].second);
  return out;
}

NeighborIndex build_neighbor_index(const numerics::Matrix& points, const Eigen::VectorXi& arms,
                                   Eigen::Index n_neighbors, bool include_self) {
  const Eigen::Index n = points.rows();
  if (n != arms.size()) throw std::invalid_argument("build_neighbor_index: label length mismatch");
  if (n_neighbors < 1) throw std::invalid_argument("build_neighbor_index: N must be >= 1");

  Eigen::Index arm_size[2] = {0, 0};
  for (Eigen::Index i = 0; i < n; ++i) {
    if (arms[i] != 0 && arms[i] != 1)
      throw std::invalid_argument("build_neighbor_index: arm labels must be 0/1");
    ++arm_size[arms[i]];
  }
  if (arm_size[0] == 0 || arm_size[1] == 0)
    throw std::invalid_argument("build_neighbor_index: one arm is empty");

  NeighborIndex index;
  for (int d = 0; d < 2; ++d) {
    const Eigen::Index candidates = include_self ? arm_size[d] : arm_size[d] - 1;
    if (candidates < 1)
      throw std::invalid_argument("build_neighbor_index: arm too small without self-matching");
    index.n_effective[d] = std::min(n_neighbors, candidates);
    if (index.n_effective[d] < n_neighbors) index.clipped = true;
  }

  index.neighbors0.resize(n);
  index.neighbors1.resize(n);
  index.k_count.assign(n, 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    const numerics::Vector q = points.row(i).transpose();
    std::optional<int> self = include_self ? std::nullopt : std::optional<int>(static_cast<int>(i));
    index.neighbors0[i] = knn_query(points, arms, q, 0, index.n_effective[0],
                                    arms[i] == 0 ? self : std::nullopt);
    index.neighbors1[i] = knn_query(points, arms, q, 1, index.n_effective[1],
                                    arms[i] == 1 ? self : std::nullopt);
    // members of the arm-d set are in arm d, so each appearance counts
    // toward that member's K_N
    for (int j : index.neighbors0[i]) ++index.k_count[j];
    for (int j : index.neighbors1[i]) ++index.k_count[j];
  }
  return index;
}

}  // namespace acee::effects
