#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "acee/bench/csv.hpp"
#include "acee/diffusion/train.hpp"
#include "acee/scm/bench_models.hpp"

namespace acee::bench {

struct ExperimentConfig {
  std::string model = "m1";  // bench model name, or "csv"
  std::string csv_path;
  CsvSchema csv_schema;
  Eigen::Index n = 200;
  Eigen::Index n_source = 4000;
  double eta = 1.0;  // auxiliary mixture weight: source row ~ M1 w.p. eta, else M3
  Eigen::Index q = 1;
  Eigen::Index m = 100;
  Eigen::Index n_neighbors = 0;  // 0 -> ceil(n^0.4)
  bool use_source = false;       // two-stage training on auxiliary data
  diffusion::TrainConfig train;
  diffusion::TrainConfig pretrain;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<std::string> estimators = {"acee", "acee_bc", "diff_means", "reg_adjust"};
  std::string out_dir = ".";

  void validate() const;
  bool is_csv() const { return model == "csv"; }
  bool is_dag_model() const;
};

ExperimentConfig experiment_config_from_json(const std::string& text);
std::string experiment_config_to_json(const ExperimentConfig& config);
ExperimentConfig load_experiment_config(const std::string& path);

struct ResultRow {
  std::string model;
  Eigen::Index n = 0;
  std::string method;
  std::uint64_t seed = 0;
  double ate_hat = 0.0;
  double true_ate = 0.0;
  double abs_err = 0.0;
  bool failed = false;
  std::string error;
};

struct MseRow {
  std::string model;
  Eigen::Index n = 0;
  std::string method;
  double mse = 0.0;
  Eigen::Index count = 0;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;
  double true_ate = std::numeric_limits<double>::quiet_NaN();

  std::vector<MseRow> mse_table() const;
};

// Per seed: simulate (or load) target data, optionally simulate auxiliary
// source data, fit the proxy, train the generator, run the configured
// estimators and score them against the model's ground truth. Failures are
// recorded per (seed, method) and the run continues.
ExperimentResult run_experiment(const ExperimentConfig& config);

// results.csv, summary.json and mse_table.csv under `dir`.
void write_experiment_outputs(const ExperimentResult& result, const ExperimentConfig& config,
                              const std::string& dir);

// Ground truth for a config: closed form when the model has one, otherwise
// the do-oracle at 10^6 coupled draws. NaN for ingested CSV data.
double experiment_true_ate(const ExperimentConfig& config);

}  // namespace acee::bench
