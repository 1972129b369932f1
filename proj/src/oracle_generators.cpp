#include "acee/effects/oracle_generators.hpp"

#include <stdexcept>

namespace acee::effects {

using numerics::Vector;

ScmOutcomeOracle::ScmOutcomeOracle(scm::Scm model) : model_(std::move(model)) {
  model_.validate();
  if (model_.treatment < 0 || model_.outcome < 0)
    throw std::invalid_argument("ScmOutcomeOracle: model needs treatment and outcome nodes");

  // covariate column order as emitted by scm::simulate
  std::vector<int> covariates;
  for (int v : model_.dag.observed_nodes())
    if (v != model_.treatment && v != model_.outcome) covariates.push_back(v);

  for (int parent : model_.dag.parents(model_.outcome)) {
    if (parent == model_.treatment) {
      parent_covariate_slot_.push_back(-1);
      continue;
    }
    int slot = -1;
    for (std::size_t c = 0; c < covariates.size(); ++c)
      if (covariates[c] == parent) slot = static_cast<int>(c);
    if (slot < 0)
      throw std::invalid_argument(
          "ScmOutcomeOracle: outcome parent " + model_.dag.label(parent) +
          " is not an observed covariate; the oracle conditional is unavailable");
    parent_covariate_slot_.push_back(slot);
  }
}

Vector ScmOutcomeOracle::draw(const Vector& x, const Vector&, int d, Eigen::Index m,
                              numerics::Rng& rng) const {
  std::vector<double> parents(parent_covariate_slot_.size());
  for (std::size_t s = 0; s < parents.size(); ++s) {
    const int slot = parent_covariate_slot_[s];
    parents[s] = slot < 0 ? static_cast<double>(d) : x[slot];
  }
  const scm::Mechanism& mech = model_.mechanisms[model_.outcome];
  const bool uniform = mech.noise.uses_uniform();
  Vector out(m);
  for (Eigen::Index r = 0; r < m; ++r)
    out[r] = mech.eval(parents, uniform ? rng.uniform() : rng.normal());
  return out;
}

ScmDagOracle::ScmDagOracle(scm::Scm model, std::vector<int> order, int source, int target)
    : model_(std::move(model)), order_(std::move(order)), source_(source), target_(target) {
  model_.validate();
  if (!model_.dag.hidden_nodes().empty())
    throw std::invalid_argument("ScmDagOracle: model must be fully observed");
  pos_source_ = -1;
  for (std::size_t t = 0; t < order_.size(); ++t)
    if (order_[t] == source_) pos_source_ = static_cast<Eigen::Index>(t);
  if (pos_source_ < 0 || target_ < 0 || target_ >= model_.dag.node_count())
    throw std::invalid_argument("ScmDagOracle: bad source/target");
}

Vector ScmDagOracle::draw(const Vector&, const Vector& x_kminus, double x_k, Eigen::Index m,
                          numerics::Rng& rng) const {
  if (x_kminus.size() != pos_source_)
    throw std::invalid_argument("ScmDagOracle: predecessor vector has wrong length");
  std::vector<scm::Scm::Intervention> clamps;
  for (Eigen::Index t = 0; t < pos_source_; ++t) clamps.push_back({order_[t], x_kminus[t]});
  clamps.push_back({source_, x_k});

  const std::vector<int> topo = model_.dag.topological_order();
  Vector out(m);
  for (Eigen::Index r = 0; r < m; ++r) {
    const Vector noise = model_.draw_noise(rng);
    out[r] = model_.evaluate(noise, clamps, &topo)[target_];
  }
  return out;
}

}  // namespace acee::effects
