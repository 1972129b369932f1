#pragma once

#include <optional>
#include <string>
#include <vector>

#include "acee/effects/dataset.hpp"
#include "acee/numerics/linalg.hpp"
#include "acee/numerics/rng.hpp"
#include "acee/scm/dag.hpp"
#include "acee/scm/term.hpp"

namespace acee::scm {

// Structural causal model: a DAG plus one mechanism per node. Mechanism
// parent slots follow the order of dag.parents(node). Hidden nodes are
// simulated like observed ones but never enter the emitted dataset.
struct Scm {
  Dag dag;
  std::vector<Mechanism> mechanisms;
  int treatment = -1;  // optional node ids
  int outcome = -1;

  // Checks arity, acyclicity and treatment/outcome sanity; throws on failure.
  void validate() const;

  // One exogenous draw per node: normal or uniform depending on the noise
  // kind. The antithetic mirror preserves every marginal.
  numerics::Vector draw_noise(numerics::Rng& rng) const;
  numerics::Vector antithetic(const numerics::Vector& noise) const;

  struct Intervention {
    int node;
    double value;
  };

  // Evaluates all nodes in topological order under the given do()-style
  // clamps. Throws (with the node label) when a mechanism emits a non-finite
  // value. Hot loops may pass a precomputed topological order.
  numerics::Vector evaluate(const numerics::Vector& noise,
                            const std::vector<Intervention>& interventions = {},
                            const std::vector<int>* order = nullptr) const;
};

struct SimulatedData {
  effects::ObservationalDataset dataset;     // X excludes treatment/outcome columns
  numerics::Matrix observed;                 // n x n_observed, every observed node
  numerics::Matrix hidden;                   // n x n_hidden, retained for oracles
  std::vector<std::string> observed_labels;  // column labels of `observed`
  std::vector<std::string> hidden_labels;
};

// n i.i.d. rows; hidden columns are returned separately, never inside the
// dataset. dataset.d / dataset.y are only populated when the model declares
// treatment and outcome nodes.
SimulatedData simulate(const Scm& scm, Eigen::Index n, numerics::Rng& rng);

}  // namespace acee::scm
