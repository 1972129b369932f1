#include "acee/scm/scm.hpp"

#include <cmath>
#include <stdexcept>

namespace acee::scm {

void Scm::validate() const {
  if (static_cast<int>(mechanisms.size()) != dag.node_count())
    throw std::invalid_argument("Scm: one mechanism per node required");
  (void)dag.topological_order();
  for (int v = 0; v < dag.node_count(); ++v) {
    const int arity = static_cast<int>(dag.parents(v).size());
    if (mechanisms[v].max_slot() >= arity)
      throw std::invalid_argument("Scm: mechanism of " + dag.label(v) +
                                  " references a slot beyond its parent set");
  }
  for (int special : {treatment, outcome}) {
    if (special < -1 || special >= dag.node_count())
      throw std::invalid_argument("Scm: treatment/outcome id out of range");
    if (special >= 0 && dag.hidden(special))
      throw std::invalid_argument("Scm: treatment/outcome cannot be hidden");
  }
  if (treatment >= 0 && treatment == outcome)
    throw std::invalid_argument("Scm: treatment equals outcome");
}

numerics::Vector Scm::draw_noise(numerics::Rng& rng) const {
  numerics::Vector noise(dag.node_count());
  for (int v = 0; v < dag.node_count(); ++v)
    noise[v] = mechanisms[v].noise.uses_uniform() ? rng.uniform() : rng.normal();
  return noise;
}

numerics::Vector Scm::antithetic(const numerics::Vector& noise) const {
  numerics::Vector out(noise.size());
  for (int v = 0; v < dag.node_count(); ++v)
    out[v] = mechanisms[v].noise.uses_uniform() ? 1.0 - noise[v] : -noise[v];
  return out;
}

numerics::Vector Scm::evaluate(const numerics::Vector& noise,
                               const std::vector<Intervention>& interventions,
                               const std::vector<int>* order) const {
  std::vector<int> own_order;
  if (!order) {
    own_order = dag.topological_order();
    order = &own_order;
  }
  numerics::Vector values(dag.node_count());
  std::vector<double> parent_buf;
  for (int v : *order) {
    bool clamped = false;
    for (const Intervention& iv : interventions)
      if (iv.node == v) {
        values[v] = iv.value;
        clamped = true;
        break;
      }
    if (clamped) continue;
    const auto& ps = dag.parents(v);
    parent_buf.resize(ps.size());
    for (std::size_t s = 0; s < ps.size(); ++s) parent_buf[s] = values[ps[s]];
    values[v] = mechanisms[v].eval(parent_buf, noise[v]);
    if (!std::isfinite(values[v]))
      throw std::runtime_error("Scm: mechanism of node " + dag.label(v) +
                               " produced a non-finite value");
  }
  return values;
}

SimulatedData simulate(const Scm& scm, Eigen::Index n, numerics::Rng& rng) {
  if (n < 1) throw std::invalid_argument("simulate: n must be >= 1");
  scm.validate();

  const std::vector<int> observed = scm.dag.observed_nodes();
  const std::vector<int> hidden = scm.dag.hidden_nodes();
  std::vector<int> covariates;  // observed minus treatment/outcome
  for (int v : observed)
    if (v != scm.treatment && v != scm.outcome) covariates.push_back(v);

  SimulatedData out;
  out.observed.resize(n, static_cast<Eigen::Index>(observed.size()));
  out.hidden.resize(n, static_cast<Eigen::Index>(hidden.size()));
  out.dataset.x.resize(n, static_cast<Eigen::Index>(covariates.size()));
  const bool with_arms = scm.treatment >= 0 && scm.outcome >= 0;
  if (with_arms) {
    out.dataset.d.resize(n);
    out.dataset.y.resize(n);
  }

  const std::vector<int> order = scm.dag.topological_order();
  for (Eigen::Index i = 0; i < n; ++i) {
    const numerics::Vector noise = scm.draw_noise(rng);
    const numerics::Vector values = scm.evaluate(noise, {}, &order);
    for (std::size_t c = 0; c < observed.size(); ++c)
      out.observed(i, static_cast<Eigen::Index>(c)) = values[observed[c]];
    for (std::size_t c = 0; c < hidden.size(); ++c)
      out.hidden(i, static_cast<Eigen::Index>(c)) = values[hidden[c]];
    for (std::size_t c = 0; c < covariates.size(); ++c)
      out.dataset.x(i, static_cast<Eigen::Index>(c)) = values[covariates[c]];
    if (with_arms) {
      out.dataset.d[i] = values[scm.treatment] > 0.5 ? 1 : 0;
      out.dataset.y[i] = values[scm.outcome];
    }
  }

  for (int v : observed) out.observed_labels.push_back(scm.dag.label(v));
  for (int v : hidden) out.hidden_labels.push_back(scm.dag.label(v));
  for (int v : covariates) out.dataset.column_names.push_back(scm.dag.label(v));
  return out;
}

}  // namespace acee::scm
