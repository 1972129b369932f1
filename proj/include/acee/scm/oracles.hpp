#pragma once

#include "acee/numerics/rng.hpp"
#include "acee/scm/scm.hpp"

namespace acee::scm {

// Monte Carlo intervention query: contrast of node `target` under
// do(source = x1) versus do(source = x0).
struct InterventionQuery {
  int source = -1;
  int target = -1;
  double x1 = 1.0;
  double x0 = 0.0;
  Eigen::Index draws = 100000;
};

struct EffectEstimate {
  double value = 0.0;
  double std_error = 0.0;
  Eigen::Index draws = 0;
};

// Total effect: both arms share exogenous draws (common random numbers) and
// draws are paired antithetically, so linear pieces cancel exactly and the
// desk-scale oracles stay tight.
EffectEstimate do_total_effect(const Scm& scm, const InterventionQuery& q, numerics::Rng& rng);

// Direct effect: mediators are held at the values they attain under
// do(source = x0); only the target's own mechanism sees x1 vs x0.
EffectEstimate do_direct_effect(const Scm& scm, const InterventionQuery& q, numerics::Rng& rng);

// Indirect effect: mediators move from their do(x0) to their do(x1) values
// while the target's mechanism keeps source = x0.
EffectEstimate do_indirect_effect(const Scm& scm, const InterventionQuery& q, numerics::Rng& rng);

}  // namespace acee::scm
