#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "acee/bench/baselines.hpp"
#include "acee/bench/csv.hpp"
#include "acee/bench/experiment.hpp"
#include "acee/diffusion/generator_adapters.hpp"
#include "acee/diffusion/train.hpp"
#include "acee/effects/estimators.hpp"
#include "acee/effects/report_io.hpp"
#include "acee/proxy/factor_proxy.hpp"
#include "acee/scm/bench_models.hpp"
#include "acee/scm/oracles.hpp"
#include "acee/scm/scm_json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace acee;

namespace {

struct GlobalOptions {
  std::uint64_t seed = 0;
  std::string out = ".";
  std::string config;
};

struct SchemaOptions {
  std::string treatment = "d";
  std::string outcome = "y";
  std::vector<std::string> covariates;

  bench::CsvSchema schema() const { return {covariates, treatment, outcome}; }
};

void add_schema_options(CLI::App* cmd, SchemaOptions& opts) {
  cmd->add_option("--treatment-col", opts.treatment, "treatment column name");
  cmd->add_option("--outcome-col", opts.outcome, "outcome column name");
  cmd->add_option("--covariate-cols", opts.covariates,
                  "covariate column names (default: all remaining)");
}

scm::Scm resolve_model(const std::string& model_name, const std::string& scm_path) {
  if (!scm_path.empty()) return scm::load_scm(scm_path);
  return scm::bench_model(scm::bench_model_kind_from_string(model_name));
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text << "\n";
}

json effect_estimate_json(const scm::EffectEstimate& est) {
  return {{"value", est.value}, {"std_error", est.std_error}, {"draws", est.draws}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ACEE: augmented causal effect estimation"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  GlobalOptions global;
  app.add_option("--seed", global.seed, "global random seed");
  app.add_option("--out", global.out, "output directory");
  app.add_option("--config", global.config, "JSON config path (bench)");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "draw a dataset from a benchmark model");
  std::string sim_model = "m1", sim_scm;
  Eigen::Index sim_n = 1000;
  bool sim_hidden = false;
  simulate->add_option("--model", sim_model, "bench model name");
  simulate->add_option("--scm", sim_scm, "SCM description JSON (overrides --model)");
  simulate->add_option("--n", sim_n, "rows to draw");
  simulate->add_flag("--with-hidden", sim_hidden, "also write hidden columns");

  // fit-proxy
  auto* fit_proxy = app.add_subcommand("fit-proxy", "constrained factor proxy of [X|D|Y]");
  std::string fp_data;
  Eigen::Index fp_q = 1;
  bool fp_no_d = false, fp_no_y = false;
  SchemaOptions fp_schema;
  fit_proxy->add_option("--data", fp_data, "dataset CSV")->required();
  fit_proxy->add_option("--q", fp_q, "factor rank");
  fit_proxy->add_flag("--exclude-d", fp_no_d, "leave D out of the stacked matrix");
  fit_proxy->add_flag("--exclude-y", fp_no_y, "leave Y out of the stacked matrix");
  add_schema_options(fit_proxy, fp_schema);

  // train
  auto* train_cmd = app.add_subcommand("train", "train the conditional score model");
  std::string tr_data, tr_source;
  Eigen::Index tr_q = 1;
  diffusion::TrainConfig tr_cfg, tr_precfg;
  tr_precfg.epochs = 300;
  SchemaOptions tr_schema;
  train_cmd->add_option("--data", tr_data, "target dataset CSV")->required();
  train_cmd->add_option("--source", tr_source, "auxiliary dataset CSV for pretraining");
  train_cmd->add_option("--q", tr_q, "factor rank");
  train_cmd->add_option("--epochs", tr_cfg.epochs, "target-stage epochs");
  train_cmd->add_option("--pretrain-epochs", tr_precfg.epochs, "source-stage epochs");
  train_cmd->add_option("--batch-size", tr_cfg.batch_size, "minibatch size");
  train_cmd->add_option("--learning-rate", tr_cfg.learning_rate, "optimizer step size");
  train_cmd->add_option("--time-draws", tr_cfg.time_draws, "time draws per example");
  add_schema_options(train_cmd, tr_schema);

  // estimate
  auto* estimate = app.add_subcommand("estimate", "ITE/ATE report from a trained model");
  std::string es_data, es_checkpoint;
  Eigen::Index es_q = 1, es_m = 100, es_neighbors = 0;
  SchemaOptions es_schema;
  estimate->add_option("--data", es_data, "dataset CSV")->required();
  estimate->add_option("--checkpoint", es_checkpoint, "score-model checkpoint")->required();
  estimate->add_option("--q", es_q, "factor rank (must match training)");
  estimate->add_option("--m", es_m, "synthetic draws per response surface");
  estimate->add_option("--n-neighbors", es_neighbors, "bias-correction neighbors (0: n^0.4)");
  add_schema_options(estimate, es_schema);

  // dag-effect
  auto* dag_effect = app.add_subcommand("dag-effect", "do-oracle effects on an SCM");
  std::string de_model = "nonlin_simpson", de_scm, de_source, de_target;
  double de_x1 = 1.0, de_x0 = 0.0;
  Eigen::Index de_draws = 100000;
  dag_effect->add_option("--model", de_model, "bench model name");
  dag_effect->add_option("--scm", de_scm, "SCM description JSON (overrides --model)");
  dag_effect->add_option("--source-node", de_source, "intervened node label");
  dag_effect->add_option("--target-node", de_target, "outcome node label");
  dag_effect->add_option("--x1", de_x1, "treatment level");
  dag_effect->add_option("--x0", de_x0, "reference level");
  dag_effect->add_option("--draws", de_draws, "Monte Carlo draws");

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "experiment harness from a JSON config");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "validate and normalize a CSV dataset");
  std::string in_data;
  SchemaOptions in_schema;
  ingest->add_option("--data", in_data, "dataset CSV")->required();
  add_schema_options(ingest, in_schema);

  // diagnose
  auto* diagnose = app.add_subcommand("diagnose", "proxy sufficiency diagnostic");
  std::string dg_data;
  Eigen::Index dg_q = 1, dg_perms = 199;
  SchemaOptions dg_schema;
  diagnose->add_option("--data", dg_data, "dataset CSV")->required();
  diagnose->add_option("--q", dg_q, "factor rank");
  diagnose->add_option("--permutations", dg_perms, "permutation count (>= 99)");
  add_schema_options(diagnose, dg_schema);

  CLI11_PARSE(app, argc, argv);

  try {
    fs::create_directories(global.out);
    const fs::path out_dir(global.out);

    if (simulate->parsed()) {
      const scm::Scm model = resolve_model(sim_model, sim_scm);
      numerics::Rng rng(global.seed, 1001);
      const scm::SimulatedData sim = scm::simulate(model, sim_n, rng);
      if (model.treatment >= 0 && model.outcome >= 0) {
        bench::write_dataset_csv(sim.dataset, (out_dir / "dataset.csv").string());
      } else {
        bench::write_matrix_csv(sim.observed, sim.observed_labels,
                                (out_dir / "dataset.csv").string());
      }
      if (sim_hidden)
        bench::write_matrix_csv(sim.hidden, sim.hidden_labels, (out_dir / "hidden.csv").string());
      json info = {{"n", sim_n},
                   {"columns", sim.observed_labels},
                   {"treated", model.treatment >= 0 ? sim.dataset.d.sum() : 0}};
      std::cout << info.dump(2) << std::endl;
      return 0;
    }

    if (fit_proxy->parsed()) {
      const auto data = bench::ingest_csv(fp_data, fp_schema.schema());
      proxy::IncludeFlags flags{true, !fp_no_d, !fp_no_y};
      const auto fit = proxy::fit_factor_proxy(data, fp_q, flags);
      bench::write_matrix_csv(fit.s_hat, fit.column_names, (out_dir / "proxy.csv").string());

      json summary;
      summary["q"] = fp_q;
      summary["columns"] = fit.column_names;
      std::vector<double> sv(fit.singular_values.data(),
                             fit.singular_values.data() + fit.singular_values.size());
      summary["singular_values"] = sv;
      // eigen-gap report only; rank selection stays with the caller
      std::vector<double> gaps;
      for (std::size_t i = 0; i + 1 < sv.size(); ++i) gaps.push_back(sv[i] - sv[i + 1]);
      summary["eigen_gaps"] = gaps;
      summary["warnings"] = fit.warnings;
      write_text(out_dir / "proxy_summary.json", summary.dump(2));
      std::cout << summary.dump(2) << std::endl;
      return 0;
    }

    if (train_cmd->parsed()) {
      const auto data = bench::ingest_csv(tr_data, tr_schema.schema());
      data.validate_for_effects();
      const auto fit = proxy::fit_factor_proxy(data, tr_q);

      diffusion::ConditioningLayout layout{data.p(), fit.s_hat.cols(), true};
      diffusion::ScoreModel model =
          diffusion::ScoreModel::with_defaults(layout, diffusion::Schedule{}, global.seed);

      auto conditioning = [](const effects::ObservationalDataset& d, const numerics::Matrix& s) {
        numerics::Matrix cond(d.n(), d.p() + s.cols() + 1);
        cond.leftCols(d.p()) = d.x;
        cond.middleCols(d.p(), s.cols()) = s;
        cond.col(cond.cols() - 1) = d.d.cast<double>();
        return cond;
      };

      tr_cfg.seed = global.seed;
      json curves;
      if (!tr_source.empty()) {
        const auto source = bench::ingest_csv(tr_source, tr_schema.schema());
        const auto source_fit = proxy::fit_factor_proxy(source, tr_q);
        tr_precfg.seed = global.seed + 1;
        tr_precfg.batch_size = std::min<Eigen::Index>(tr_cfg.batch_size, source.n());
        const auto pre_report = diffusion::pretrain_source(
            model, conditioning(source, source_fit.s_hat), source.y, tr_precfg);
        curves["pretrain_epoch_loss"] = pre_report.epoch_loss;
        tr_cfg.batch_size = std::min<Eigen::Index>(tr_cfg.batch_size, data.n());
        const auto report =
            diffusion::finetune_target(model, conditioning(data, fit.s_hat), data.y, tr_cfg);
        curves["epoch_loss"] = report.epoch_loss;
      } else {
        tr_cfg.batch_size = std::min<Eigen::Index>(tr_cfg.batch_size, data.n());
        const auto report =
            diffusion::train(model, conditioning(data, fit.s_hat), data.y, tr_cfg);
        curves["epoch_loss"] = report.epoch_loss;
      }
      model.save((out_dir / "model.json").string());
      write_text(out_dir / "training_curve.json", curves.dump());
      std::cout << json{{"checkpoint", (out_dir / "model.json").string()}}.dump(2) << std::endl;
      return 0;
    }

    if (estimate->parsed()) {
      const auto data = bench::ingest_csv(es_data, es_schema.schema());
      data.validate_for_effects();
      const auto model = diffusion::ScoreModel::load(es_checkpoint);
      const auto fit = proxy::fit_factor_proxy(data, es_q);
      if (model.layout().x_dim != data.p() || model.layout().s_dim != fit.s_hat.cols())
        throw std::runtime_error("checkpoint layout does not match the dataset");

      diffusion::ScoreModelOutcomeGenerator generator(model);
      effects::EstimateOptions opts;
      opts.m = es_m;
      opts.n_neighbors = es_neighbors;
      opts.seed = global.seed;
      opts.proxy_rank = static_cast<int>(es_q);
      const auto report = effects::estimate_effects(data, fit.s_hat, generator, opts);
      effects::write_effect_report_csv(report, data, (out_dir / "report.csv").string());
      effects::write_effect_report_summary(report, (out_dir / "summary.json").string());
      std::cout << effects::effect_report_summary_json(report) << std::endl;
      return 0;
    }

    if (dag_effect->parsed()) {
      const scm::Scm model = resolve_model(de_model, de_scm);
      scm::InterventionQuery query;
      if (de_source.empty() || de_target.empty()) {
        query = scm::default_query(model, scm::bench_model_kind_from_string(de_model));
      } else {
        query.source = model.dag.index_of(de_source);
        query.target = model.dag.index_of(de_target);
        if (query.source < 0 || query.target < 0)
          throw std::runtime_error("unknown node label in --source-node/--target-node");
      }
      query.x1 = de_x1;
      query.x0 = de_x0;
      query.draws = de_draws;

      numerics::Rng rng(global.seed, 2001);
      json result;
      result["query"] = {{"source", model.dag.label(query.source)},
                         {"target", model.dag.label(query.target)},
                         {"x1", query.x1},
                         {"x0", query.x0},
                         {"draws", query.draws}};
      result["total"] = effect_estimate_json(scm::do_total_effect(model, query, rng));
      result["direct"] = effect_estimate_json(scm::do_direct_effect(model, query, rng));
      result["indirect"] = effect_estimate_json(scm::do_indirect_effect(model, query, rng));
      write_text(out_dir / "dag_effect.json", result.dump(2));
      std::cout << result.dump(2) << std::endl;
      return 0;
    }

    if (bench_cmd->parsed()) {
      if (global.config.empty()) throw std::runtime_error("bench requires --config");
      bench::ExperimentConfig config = bench::load_experiment_config(global.config);
      if (global.out != ".") config.out_dir = global.out;
      const auto result = bench::run_experiment(config);
      bench::write_experiment_outputs(result, config, config.out_dir);
      Eigen::Index failures = 0;
      for (const auto& row : result.rows) failures += row.failed ? 1 : 0;
      std::cout << json{{"rows", result.rows.size()},
                        {"failures", failures},
                        {"out_dir", config.out_dir}}
                       .dump(2)
                << std::endl;
      return 0;
    }

    if (ingest->parsed()) {
      const auto data = bench::ingest_csv(in_data, in_schema.schema());
      bench::write_dataset_csv(data, (out_dir / "dataset.csv").string());
      json info = {{"n", data.n()},
                   {"p", data.p()},
                   {"treated", data.arm_size(1)},
                   {"control", data.arm_size(0)},
                   {"covariates", data.column_names}};
      std::cout << info.dump(2) << std::endl;
      return 0;
    }

    if (diagnose->parsed()) {
      const auto data = bench::ingest_csv(dg_data, dg_schema.schema());
      const auto fit = proxy::fit_factor_proxy(data, dg_q);
      numerics::Rng rng(global.seed, 3001);
      const auto diag = proxy::proxy_sufficiency_diagnostic(data, fit, dg_perms, rng);
      json result = {{"statistic", diag.statistic},
                     {"p_value", diag.p_value},
                     {"permutations", diag.permutations},
                     {"warnings", diag.warnings}};
      write_text(out_dir / "diagnostic.json", result.dump(2));
      std::cout << result.dump(2) << std::endl;
      return 0;
    }
  } catch (const std::exception& e) {
    const json err = {{"error", {{"message", e.what()}}}};
    std::cerr << err.dump() << std::endl;
    return 1;
  }
  return 0;
}
