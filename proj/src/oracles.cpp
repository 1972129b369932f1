#include "acee/scm/oracles.hpp"

#include <cmath>
#include <stdexcept>

namespace acee::scm {

namespace {

void check_query(const Scm& scm, const InterventionQuery& q) {
  const int p = scm.dag.node_count();
  if (q.source < 0 || q.source >= p || q.target < 0 || q.target >= p)
    throw std::invalid_argument("intervention query: node id out of range");
  if (q.source == q.target)
    throw std::invalid_argument("intervention query: source equals target");
  if (q.draws < 1) throw std::invalid_argument("intervention query: draws must be >= 1");
  if (scm.dag.reachable(q.target, q.source))
    throw std::invalid_argument("intervention query: source follows target in every causal order");
}

EffectEstimate reduce_pairs(const std::vector<double>& pair_means) {
  EffectEstimate est;
  est.draws = static_cast<Eigen::Index>(pair_means.size());
  double sum = 0.0;
  for (double v : pair_means) sum += v;
  const double mean = sum / static_cast<double>(pair_means.size());
  double ss = 0.0;
  for (double v : pair_means) ss += (v - mean) * (v - mean);
  est.value = mean;
  est.std_error = pair_means.size() > 1
                      ? std::sqrt(ss / (static_cast<double>(pair_means.size()) *
                                        static_cast<double>(pair_means.size() - 1)))
                      : 0.0;
  return est;
}

// Runs `contrast` on a noise vector and its antithetic mirror, collecting
// pair averages. `draws` counts individual exogenous draws.
template <typename Contrast>
EffectEstimate antithetic_mc(const Scm& scm, Eigen::Index draws, numerics::Rng& rng,
                             Contrast&& contrast) {
  const Eigen::Index pairs = std::max<Eigen::Index>(1, draws / 2);
  std::vector<double> pair_means;
  pair_means.reserve(pairs);
  for (Eigen::Index r = 0; r < pairs; ++r) {
    const numerics::Vector noise = scm.draw_noise(rng);
    const double a = contrast(noise);
    const double b = contrast(scm.antithetic(noise));
    pair_means.push_back(0.5 * (a + b));
  }
  EffectEstimate est = reduce_pairs(pair_means);
  est.draws = 2 * pairs;
  return est;
}

}  // namespace

EffectEstimate do_total_effect(const Scm& scm, const InterventionQuery& q, numerics::Rng& rng) {
  scm.validate();
  check_query(scm, q);
  const std::vector<int> order = scm.dag.topological_order();
  return antithetic_mc(scm, q.draws, rng, [&](const numerics::Vector& noise) {
    const numerics::Vector v1 = scm.evaluate(noise, {{q.source, q.x1}}, &order);
    const numerics::Vector v0 = scm.evaluate(noise, {{q.source, q.x0}}, &order);
    return v1[q.target] - v0[q.target];
  });
}

namespace {

// Target value from its own mechanism with the source clamped to source_value
// (when it is a parent) and the remaining parents taken from `world`.
double eval_target(const Scm& scm, int target, int source, double source_value,
                   const numerics::Vector& world, double target_noise) {
  const auto& ps = scm.dag.parents(target);
  std::vector<double> parent_buf(ps.size());
  for (std::size_t s = 0; s < ps.size(); ++s)
    parent_buf[s] = ps[s] == source ? source_value : world[ps[s]];
  return scm.mechanisms[target].eval(parent_buf, target_noise);
}

}  // namespace

EffectEstimate do_direct_effect(const Scm& scm, const InterventionQuery& q, numerics::Rng& rng) {
  scm.validate();
  check_query(scm, q);
  const std::vector<int> order = scm.dag.topological_order();
  return antithetic_mc(scm, q.draws, rng, [&](const numerics::Vector& noise) {
    const numerics::Vector base = scm.evaluate(noise, {{q.source, q.x0}}, &order);
    const double at_x1 = eval_target(scm, q.target, q.source, q.x1, base, noise[q.target]);
    const double at_x0 = eval_target(scm, q.target, q.source, q.x0, base, noise[q.target]);
    return at_x1 - at_x0;
  });
}

EffectEstimate do_indirect_effect(const Scm& scm, const InterventionQuery& q, numerics::Rng& rng) {
  scm.validate();
  check_query(scm, q);
  const std::vector<int> order = scm.dag.topological_order();
  return antithetic_mc(scm, q.draws, rng, [&](const numerics::Vector& noise) {
    const numerics::Vector moved = scm.evaluate(noise, {{q.source, q.x1}}, &order);
    const numerics::Vector base = scm.evaluate(noise, {{q.source, q.x0}}, &order);
    const double mediators_x1 = eval_target(scm, q.target, q.source, q.x0, moved, noise[q.target]);
    const double mediators_x0 = eval_target(scm, q.target, q.source, q.x0, base, noise[q.target]);
    return mediators_x1 - mediators_x0;
  });
}

}  // namespace acee::scm
