#include "acee/effects/report_io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace acee::effects {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void write_effect_report_csv(const EffectReport& report, const ObservationalDataset& dataset,
                             const std::string& path) {
  if (report.mu0.size() != dataset.n())
    throw std::invalid_argument("report does not match dataset");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write report: " + path);
  out << "unit,d,y,mu0,mu1,mu0_c,mu1_c,tau,tau_c,k_count,residual\n";
  for (Eigen::Index i = 0; i < dataset.n(); ++i) {
    out << i << "," << dataset.d[i] << "," << fmt(dataset.y[i]) << "," << fmt(report.mu0[i]) << ","
        << fmt(report.mu1[i]) << "," << fmt(report.mu0_c[i]) << "," << fmt(report.mu1_c[i]) << ","
        << fmt(report.tau_unit[i]) << "," << fmt(report.tau_unit_c[i]) << "," << report.k_count[i]
        << "," << fmt(report.residual[i]) << "\n";
  }
}

std::string effect_report_summary_json(const EffectReport& report) {
  nlohmann::json j;
  j["tau_hat"] = report.tau_hat;
  j["tau_hat_bc"] = report.tau_hat_bc;
  j["tau_hat_bc_closed_form"] = report.tau_hat_bc_closed;
  j["settings"] = {{"m", report.m},
                   {"n_neighbors", report.n_neighbors},
                   {"q", report.proxy_rank},
                   {"seed", report.seed}};
  j["n_effective"] = {report.neighbors.n_effective[0], report.neighbors.n_effective[1]};
  j["warnings"] = report.warnings;
  return j.dump(2);
}

void write_effect_report_summary(const EffectReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write summary: " + path);
  out << effect_report_summary_json(report) << "\n";
}

}  // namespace acee::effects
