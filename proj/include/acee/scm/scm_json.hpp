#pragma once

#include <string>

#include "acee/scm/scm.hpp"

namespace acee::scm {

// JSON description files:
//   {
//     "nodes": [{"name": "X1", "hidden": false}, ...],
//     "edges": [["X1", "X2"], ...],
//     "treatment": "D",            // optional
//     "outcome": "Y",              // optional
//     "mechanisms": {
//       "X2": {
//         "terms": [{"kind": "lin", "of": "X1", "c": 0.5}, ...],
//         "noise": {"kind": "additive", "scale": 1.0}
//       }, ...
//     }
//   }
// Term parents are referenced by node name and must be declared parents.
// Term kinds: const, lin, quad, prod2, exp_lin, sin_prod2, tanh, logistic,
// log_sigmoid. Noise kinds: additive, mult_exp, mult_raw, bernoulli_u,
// bernoulli_exp_u; additive noise accepts "scale_terms" in place of "scale".
std::string scm_to_json(const Scm& scm);
Scm scm_from_json(const std::string& text);

Scm load_scm(const std::string& path);
void save_scm(const Scm& scm, const std::string& path);

}  // namespace acee::scm
