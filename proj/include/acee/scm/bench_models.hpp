#pragma once

#include <optional>
#include <string>

#include "acee/scm/oracles.hpp"
#include "acee/scm/scm.hpp"

namespace acee::scm {

enum class BenchModelKind {
  M1,              // nonlinear outcome, additive Gaussian noise
  M2,              // additive noise with predictor-dependent variance
  M3,              // multiplicative lognormal noise
  M4,              // unobserved confounder driving X1..X3 and the treatment
  NonlinSimpson,   // 4-node Simpson's-paradox graph
  SymprodSimpson,  // 4-node product-mechanism graph
  LargeBackdoor,   // 9-node chain pair with a long back-door
  WeakArrows,      // LargeBackdoor plus many weak edges into the outcome
  Example1,        // additive-confounder model where proxy sufficiency holds
  LinearV,         // X = V^T X + eps with strictly upper-triangular V
};

struct BenchModel {
  BenchModelKind kind = BenchModelKind::M1;
  numerics::Matrix v;  // LinearV coefficient matrix, V(k,j) = 0 for k >= j

  static BenchModel of(BenchModelKind k) { return BenchModel{k, {}}; }
  static BenchModel linear(numerics::Matrix v) {
    return BenchModel{BenchModelKind::LinearV, std::move(v)};
  }
};

Scm bench_model(const BenchModel& model);
inline Scm bench_model(BenchModelKind kind) { return bench_model(BenchModel::of(kind)); }

// Closed-form average treatment effect where one exists (M1-M4, Example1).
std::optional<double> true_ate(BenchModelKind kind);

// Canonical intervention query for the DAG-style models (unit contrast on
// the model's conventional source/outcome pair).
InterventionQuery default_query(const Scm& scm, BenchModelKind kind);

// Same graphs under a shifted law; used as auxiliary-data generators for
// transfer experiments.
Scm shifted_variant(BenchModelKind kind);

BenchModelKind bench_model_kind_from_string(const std::string& name);
std::string to_string(BenchModelKind kind);

}  // namespace acee::scm
