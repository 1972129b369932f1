#include "acee/bench/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "acee/bench/baselines.hpp"
#include "acee/diffusion/generator_adapters.hpp"
#include "acee/effects/estimators.hpp"
#include "acee/proxy/factor_proxy.hpp"
#include "acee/scm/oracles.hpp"

namespace acee::bench {

using effects::ObservationalDataset;
using numerics::Matrix;
using numerics::Rng;
using numerics::Vector;

void ExperimentConfig::validate() const {
  if (!is_csv()) (void)scm::bench_model_kind_from_string(model);
  if (is_csv() && csv_path.empty())
    throw std::invalid_argument("experiment: csv model needs csv_path");
  if (n < 10) throw std::invalid_argument("experiment: n must be >= 10");
  if (seeds.empty()) throw std::invalid_argument("experiment: seeds must be non-empty");
  if (eta < 0.0 || eta > 1.0) throw std::invalid_argument("experiment: eta must lie in [0,1]");
  if (q < 1) throw std::invalid_argument("experiment: q must be >= 1");
  if (m < 1) throw std::invalid_argument("experiment: m must be >= 1");
  if (estimators.empty()) throw std::invalid_argument("experiment: no estimators configured");
  train.validate();
  pretrain.validate();
}

bool ExperimentConfig::is_dag_model() const {
  if (is_csv()) return false;
  switch (scm::bench_model_kind_from_string(model)) {
    case scm::BenchModelKind::NonlinSimpson:
    case scm::BenchModelKind::SymprodSimpson:
    case scm::BenchModelKind::LargeBackdoor:
    case scm::BenchModelKind::WeakArrows:
      return true;
    default:
      return false;
  }
}

namespace {

using nlohmann::json;

json train_config_to_json(const diffusion::TrainConfig& c) {
  return {{"epochs", c.epochs},
          {"batch_size", c.batch_size},
          {"learning_rate", c.learning_rate},
          {"time_draws", c.time_draws},
          {"weighting", c.weighting == diffusion::LossWeighting::Sigma2 ? "sigma2" : "unweighted"},
          {"seed", c.seed}};
}

diffusion::TrainConfig train_config_from_json(const json& j, diffusion::TrainConfig base) {
  base.epochs = j.value("epochs", base.epochs);
  base.batch_size = j.value("batch_size", base.batch_size);
  base.learning_rate = j.value("learning_rate", base.learning_rate);
  base.time_draws = j.value("time_draws", base.time_draws);
  const std::string w = j.value("weighting", std::string("sigma2"));
  base.weighting =
      w == "unweighted" ? diffusion::LossWeighting::Unweighted : diffusion::LossWeighting::Sigma2;
  base.seed = j.value("seed", base.seed);
  return base;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

ExperimentConfig experiment_config_from_json(const std::string& text) {
  const json j = json::parse(text);
  ExperimentConfig c;
  c.model = j.value("model", c.model);
  c.csv_path = j.value("csv_path", c.csv_path);
  if (j.contains("csv_schema")) {
    const json& s = j.at("csv_schema");
    c.csv_schema.covariate_cols =
        s.value("covariates", std::vector<std::string>{});
    c.csv_schema.treatment_col = s.value("treatment", c.csv_schema.treatment_col);
    c.csv_schema.outcome_col = s.value("outcome", c.csv_schema.outcome_col);
  }
  c.n = j.value("n", c.n);
  c.n_source = j.value("n_source", c.n_source);
  c.eta = j.value("eta", c.eta);
  c.q = j.value("q", c.q);
  c.m = j.value("m", c.m);
  c.n_neighbors = j.value("n_neighbors", c.n_neighbors);
  c.use_source = j.value("use_source", c.use_source);
  if (j.contains("train")) c.train = train_config_from_json(j.at("train"), c.train);
  if (j.contains("pretrain")) c.pretrain = train_config_from_json(j.at("pretrain"), c.pretrain);
  c.seeds = j.value("seeds", c.seeds);
  c.estimators = j.value("estimators", c.estimators);
  c.out_dir = j.value("out_dir", c.out_dir);
  c.validate();
  return c;
}

std::string experiment_config_to_json(const ExperimentConfig& c) {
  json j;
  j["model"] = c.model;
  if (!c.csv_path.empty()) {
    j["csv_path"] = c.csv_path;
    j["csv_schema"] = {{"covariates", c.csv_schema.covariate_cols},
                       {"treatment", c.csv_schema.treatment_col},
                       {"outcome", c.csv_schema.outcome_col}};
  }
  j["n"] = c.n;
  j["n_source"] = c.n_source;
  j["eta"] = c.eta;
  j["q"] = c.q;
  j["m"] = c.m;
  j["n_neighbors"] = c.n_neighbors;
  j["use_source"] = c.use_source;
  j["train"] = train_config_to_json(c.train);
  j["pretrain"] = train_config_to_json(c.pretrain);
  j["seeds"] = c.seeds;
  j["estimators"] = c.estimators;
  j["out_dir"] = c.out_dir;
  return j.dump(2);
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return experiment_config_from_json(text);
}

namespace {

// Auxiliary mixture of §-style source rows: each row from M1 w.p. eta, M3
// otherwise. The two models share a column layout.
ObservationalDataset simulate_source_mixture(Eigen::Index n_source, double eta, Rng& rng) {
  const scm::Scm m1 = scm::bench_model(scm::BenchModelKind::M1);
  const scm::Scm m3 = scm::bench_model(scm::BenchModelKind::M3);
  ObservationalDataset out;
  out.x.resize(n_source, 5);
  out.d.resize(n_source);
  out.y.resize(n_source);
  for (Eigen::Index i = 0; i < n_source; ++i) {
    const bool pick_m1 = rng.uniform() < eta;
    const scm::SimulatedData row = scm::simulate(pick_m1 ? m1 : m3, 1, rng);
    out.x.row(i) = row.dataset.x.row(0);
    out.d[i] = row.dataset.d[0];
    out.y[i] = row.dataset.y[0];
    if (out.column_names.empty()) out.column_names = row.dataset.column_names;
  }
  return out;
}

Matrix treatment_conditioning(const ObservationalDataset& data, const Matrix& proxy_cols) {
  Matrix cond(data.n(), data.p() + proxy_cols.cols() + 1);
  cond.leftCols(data.p()) = data.x;
  cond.middleCols(data.p(), proxy_cols.cols()) = proxy_cols;
  cond.col(cond.cols() - 1) = data.d.cast<double>();
  return cond;
}

struct SeedContext {
  ExperimentConfig config;
  std::uint64_t seed = 0;
};

// ACEE on a treatment-effect model: factor proxy, conditional diffusion for
// Y | (X, S, D), per-unit response surfaces, bias-corrected aggregate.
effects::EffectReport run_acee_treatment(const SeedContext& ctx, const ObservationalDataset& data) {
  const auto& config = ctx.config;
  const proxy::FactorProxy fp = proxy::fit_factor_proxy(data, config.q);
  const Matrix proxy_cols = fp.proxy_columns();

  diffusion::ConditioningLayout layout;
  layout.x_dim = data.p();
  layout.s_dim = proxy_cols.cols();
  layout.has_treatment = true;
  diffusion::Schedule schedule;
  diffusion::ScoreModel model =
      diffusion::ScoreModel::with_defaults(layout, schedule, ctx.seed * 1000003ULL + 17);

  diffusion::TrainConfig tcfg = config.train;
  tcfg.seed = ctx.seed * 31ULL + 1;
  tcfg.batch_size = std::min<Eigen::Index>(tcfg.batch_size, data.n());

  if (config.use_source) {
    Rng source_rng(ctx.seed, 2002);
    const ObservationalDataset source =
        simulate_source_mixture(config.n_source, config.eta, source_rng);
    const proxy::FactorProxy fp_s = proxy::fit_factor_proxy(source, config.q);
    diffusion::TrainConfig pcfg = config.pretrain;
    pcfg.seed = ctx.seed * 31ULL + 2;
    pcfg.batch_size = std::min<Eigen::Index>(pcfg.batch_size, source.n());
    diffusion::pretrain_source(model, treatment_conditioning(source, fp_s.proxy_columns()),
                               source.y, pcfg);
    diffusion::finetune_target(model, treatment_conditioning(data, proxy_cols), data.y, tcfg);
  } else {
    diffusion::train(model, treatment_conditioning(data, proxy_cols), data.y, tcfg);
  }

  diffusion::ScoreModelOutcomeGenerator generator(model);
  effects::EstimateOptions opts;
  opts.m = config.m;
  opts.n_neighbors = config.n_neighbors;
  opts.seed = ctx.seed * 97ULL + 5;
  opts.proxy_rank = static_cast<int>(config.q);
  return effects::estimate_effects(data, proxy_cols, generator, opts);
}

// ACEE total effect over a DAG model: residual proxy, conditional diffusion
// for X_j | (X_{k^+}, S), per-unit contrasts at the query levels.
double run_acee_dag(const SeedContext& ctx, const scm::Scm& target_scm,
                    const scm::InterventionQuery& query, const Matrix& x_observed) {
  const auto& config = ctx.config;
  const std::vector<int> order = target_scm.dag.topological_order();
  Eigen::Index pos_k = -1;
  for (std::size_t t = 0; t < order.size(); ++t)
    if (order[t] == query.source) pos_k = static_cast<Eigen::Index>(t);
  if (pos_k < 0) throw std::invalid_argument("dag pipeline: query source not in the order");

  const proxy::ResidualProxy rp = proxy::fit_residual_proxy(x_observed, config.q);

  auto conditioning = [&](const Matrix& x, const Matrix& s) {
    Matrix cond(x.rows(), pos_k + 1 + s.cols());
    for (Eigen::Index t = 0; t <= pos_k; ++t) cond.col(t) = x.col(order[t]);
    cond.rightCols(s.cols()) = s;
    return cond;
  };
  auto target_col = [&](const Matrix& x) { return Vector(x.col(query.target)); };

  diffusion::ConditioningLayout layout;
  layout.x_dim = pos_k + 1;
  layout.s_dim = rp.s_hat_resid.cols();
  layout.has_treatment = false;
  diffusion::Schedule schedule;
  diffusion::ScoreModel model =
      diffusion::ScoreModel::with_defaults(layout, schedule, ctx.seed * 1000003ULL + 29);

  diffusion::TrainConfig tcfg = config.train;
  tcfg.seed = ctx.seed * 31ULL + 3;
  tcfg.batch_size = std::min<Eigen::Index>(tcfg.batch_size, x_observed.rows());

  if (config.use_source) {
    const scm::Scm source_scm =
        scm::shifted_variant(scm::bench_model_kind_from_string(config.model));
    Rng source_rng(ctx.seed, 2003);
    const scm::SimulatedData source = scm::simulate(source_scm, config.n_source, source_rng);
    const proxy::ResidualProxy rp_s = proxy::fit_residual_proxy(source.observed, config.q);
    diffusion::TrainConfig pcfg = config.pretrain;
    pcfg.seed = ctx.seed * 31ULL + 4;
    pcfg.batch_size = std::min<Eigen::Index>(pcfg.batch_size, source.observed.rows());
    diffusion::pretrain_source(model, conditioning(source.observed, rp_s.s_hat_resid),
                               target_col(source.observed), pcfg);
    diffusion::finetune_target(model, conditioning(x_observed, rp.s_hat_resid),
                               target_col(x_observed), tcfg);
  } else {
    diffusion::train(model, conditioning(x_observed, rp.s_hat_resid), target_col(x_observed),
                     tcfg);
  }

  diffusion::ScoreModelDagGenerator generator(model);
  effects::DagEffectOptions opts;
  opts.m = config.m;
  opts.seed = ctx.seed * 97ULL + 7;
  const auto result = effects::estimate_dag_total_effect(
      x_observed, order, query.source, query.target, query.x1, query.x0, rp.s_hat_resid,
      generator, opts);
  return result.tau_hat;
}

}  // namespace

double experiment_true_ate(const ExperimentConfig& config) {
  if (config.is_csv()) return std::numeric_limits<double>::quiet_NaN();
  const auto kind = scm::bench_model_kind_from_string(config.model);
  if (const auto closed = scm::true_ate(kind)) return *closed;
  const scm::Scm model = scm::bench_model(kind);
  scm::InterventionQuery q = scm::default_query(model, kind);
  q.draws = 1000000;
  Rng rng(424242, 7);
  return scm::do_total_effect(model, q, rng).value;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  ExperimentResult result;
  result.true_ate = experiment_true_ate(config);

  ObservationalDataset csv_data;
  if (config.is_csv()) csv_data = ingest_csv(config.csv_path, config.csv_schema);

  const bool dag = config.is_dag_model();
  for (std::uint64_t seed : config.seeds) {
    SeedContext ctx{config, seed};

    // shared target data for this seed
    ObservationalDataset data;
    scm::Scm target_scm;
    scm::InterventionQuery query;
    Matrix x_observed;
    std::string data_error;
    try {
      if (config.is_csv()) {
        data = csv_data;
      } else {
        const auto kind = scm::bench_model_kind_from_string(config.model);
        target_scm = scm::bench_model(kind);
        Rng rng(seed, 1001);
        const scm::SimulatedData sim = scm::simulate(target_scm, config.n, rng);
        data = sim.dataset;
        x_observed = sim.observed;
        if (dag) query = scm::default_query(target_scm, kind);
      }
    } catch (const std::exception& e) {
      data_error = e.what();
    }

    // heavy ACEE pipeline shared between acee and acee_bc
    bool want_acee = false;
    for (const auto& est : config.estimators)
      if (est == "acee" || est == "acee_bc") want_acee = true;
    double acee_hat = 0.0, acee_bc_hat = 0.0;
    std::string acee_error = data_error;
    if (want_acee && acee_error.empty()) {
      try {
        if (dag) {
          acee_hat = run_acee_dag(ctx, target_scm, query, x_observed);
          acee_bc_hat = acee_hat;  // no residual correction in the DAG path
        } else {
          const effects::EffectReport report = run_acee_treatment(ctx, data);
          acee_hat = report.tau_hat;
          acee_bc_hat = report.tau_hat_bc;
        }
      } catch (const std::exception& e) {
        acee_error = e.what();
      }
    }

    for (const std::string& method : config.estimators) {
      ResultRow row;
      row.model = config.model;
      row.n = config.n;
      row.method = method;
      row.seed = seed;
      row.true_ate = result.true_ate;
      try {
        if (!data_error.empty()) throw std::runtime_error(data_error);
        if (method == "acee") {
          if (!acee_error.empty()) throw std::runtime_error(acee_error);
          row.ate_hat = acee_hat;
        } else if (method == "acee_bc") {
          if (dag)
            throw std::runtime_error("acee_bc applies to treatment-effect models only");
          if (!acee_error.empty()) throw std::runtime_error(acee_error);
          row.ate_hat = acee_bc_hat;
        } else if (method == "diff_means") {
          if (dag) throw std::runtime_error("diff_means needs a treatment arm");
          row.ate_hat = baseline_diff_means(data);
        } else if (method == "reg_adjust") {
          if (dag) throw std::runtime_error("reg_adjust needs a treatment arm");
          row.ate_hat = baseline_reg_adjust(data).ate_hat;
        } else {
          throw std::runtime_error("unknown estimator: " + method);
        }
        row.abs_err = std::abs(row.ate_hat - row.true_ate);
      } catch (const std::exception& e) {
        row.failed = true;
        row.error = e.what();
        row.ate_hat = std::numeric_limits<double>::quiet_NaN();
        row.abs_err = std::numeric_limits<double>::quiet_NaN();
      }
      result.rows.push_back(std::move(row));
    }
  }
  return result;
}

std::vector<MseRow> ExperimentResult::mse_table() const {
  std::vector<MseRow> table;
  for (const ResultRow& row : rows) {
    if (row.failed || !std::isfinite(row.abs_err)) continue;
    MseRow* slot = nullptr;
    for (MseRow& m : table)
      if (m.model == row.model && m.n == row.n && m.method == row.method) slot = &m;
    if (!slot) {
      table.push_back({row.model, row.n, row.method, 0.0, 0});
      slot = &table.back();
    }
    slot->mse += row.abs_err * row.abs_err;
    slot->count += 1;
  }
  for (MseRow& m : table) m.mse /= static_cast<double>(std::max<Eigen::Index>(1, m.count));
  return table;
}

void write_experiment_outputs(const ExperimentResult& result, const ExperimentConfig& config,
                              const std::string& dir) {
  std::filesystem::create_directories(dir);

  std::ofstream rows(std::filesystem::path(dir) / "results.csv");
  if (!rows) throw std::runtime_error("cannot write results.csv under " + dir);
  rows << "model,n,method,seed,ate_hat,true_ate,abs_err,failed,error\n";
  for (const ResultRow& r : result.rows) {
    rows << r.model << "," << r.n << "," << r.method << "," << r.seed << "," << fmt(r.ate_hat)
         << "," << fmt(r.true_ate) << "," << fmt(r.abs_err) << "," << (r.failed ? 1 : 0) << ","
         << r.error << "\n";
  }

  std::ofstream mse(std::filesystem::path(dir) / "mse_table.csv");
  mse << "model,n,method,mse,count\n";
  for (const MseRow& m : result.mse_table())
    mse << m.model << "," << m.n << "," << m.method << "," << fmt(m.mse) << "," << m.count << "\n";

  json summary;
  summary["config"] = json::parse(experiment_config_to_json(config));
  summary["true_ate"] = result.true_ate;
  json mse_json = json::array();
  for (const MseRow& m : result.mse_table())
    mse_json.push_back(
        {{"model", m.model}, {"n", m.n}, {"method", m.method}, {"mse", m.mse}, {"count", m.count}});
  summary["mse"] = mse_json;
  Eigen::Index failures = 0;
  for (const ResultRow& r : result.rows) failures += r.failed ? 1 : 0;
  summary["failures"] = failures;
  std::ofstream sj(std::filesystem::path(dir) / "summary.json");
  sj << summary.dump(2) << "\n";
}

}  // namespace acee::bench
