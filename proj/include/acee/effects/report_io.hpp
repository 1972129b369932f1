#pragma once

#include <string>

#include "acee/effects/estimators.hpp"

namespace acee::effects {

// Per-unit table: unit id, D, Y, mu0, mu1, mu0_c, mu1_c, tau, tau_c, K_N,
// residual.
void write_effect_report_csv(const EffectReport& report, const ObservationalDataset& dataset,
                             const std::string& path);

// Aggregate summary (tau_hat, tau_hat_bc, settings, seed) as JSON text.
std::string effect_report_summary_json(const EffectReport& report);
void write_effect_report_summary(const EffectReport& report, const std::string& path);

}  // namespace acee::effects
