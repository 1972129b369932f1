#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "acee/effects/estimators.hpp"
#include "acee/effects/knn.hpp"
#include "acee/effects/oracle_generators.hpp"
#include "acee/effects/report_io.hpp"
#include "acee/scm/bench_models.hpp"
#include "acee/scm/oracles.hpp"
#include "support/test_oracles.hpp"

using namespace acee;
using effects::ObservationalDataset;
using numerics::Matrix;
using numerics::Vector;

namespace {

// deterministic generator driven by a (x[0], d) lookup table
class TableGenerator : public effects::OutcomeGenerator {
 public:
  TableGenerator(std::map<std::pair<int, int>, double> table) : table_(std::move(table)) {}
  Vector draw(const Vector& x, const Vector&, int d, Eigen::Index m,
              numerics::Rng&) const override {
    const double v = table_.at({static_cast<int>(std::lround(x[0])), d});
    return Vector::Constant(m, v);
  }

 private:
  std::map<std::pair<int, int>, double> table_;
};

// Y = 1 + 2 x0 + d * (3 + x0), reproduced exactly by the generator
class ExactLinearGenerator : public effects::OutcomeGenerator {
 public:
  Vector draw(const Vector& x, const Vector&, int d, Eigen::Index m,
              numerics::Rng&) const override {
    return Vector::Constant(m, 1.0 + 2.0 * x[0] + d * (3.0 + x[0]));
  }
};

ObservationalDataset linear_dataset(Eigen::Index n, numerics::Rng& rng) {
  ObservationalDataset data;
  data.x = rng.normal_matrix(n, 2);
  data.d.resize(n);
  data.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    data.d[i] = rng.uniform() < 0.5 ? 1 : 0;
    data.y[i] = 1.0 + 2.0 * data.x(i, 0) + data.d[i] * (3.0 + data.x(i, 0));
  }
  return data;
}

}  // namespace

TEST_CASE("knn_query: hand-checked one-dimensional neighborhoods") {
  Matrix points(4, 1);
  points << 0.0, 1.0, 3.0, 50.0;
  Eigen::VectorXi arms(4);
  arms << 0, 0, 0, 1;
  Vector query(1);
  query << 0.9;
  // distances within the control arm: 0.9, 0.1, 2.1
  const auto two = effects::knn_query(points, arms, query, 0, 2);
  REQUIRE(two.size() == 2);
  CHECK(two[0] == 1);
  CHECK(two[1] == 0);
  // N at least the arm size returns the whole arm
  const auto all = effects::knn_query(points, arms, query, 0, 10);
  CHECK(all == std::vector<int>{1, 0, 2});
  CHECK_THROWS(effects::knn_query(points, arms, query, 2, 1));
}

TEST_CASE("knn_query: duplicate points break ties by lowest index") {
  Matrix points = Matrix::Zero(4, 2);
  Eigen::VectorXi arms = Eigen::VectorXi::Zero(4);
  Vector query = Vector::Zero(2);
  const auto got = effects::knn_query(points, arms, query, 0, 2);
  CHECK(got == std::vector<int>{0, 1});
}

TEST_CASE("knn_query: agrees with a brute-force scan on 200 random instances") {
  numerics::Rng rng(40, 0);
  for (int rep = 0; rep < 200; ++rep) {
    const Eigen::Index n = 5 + static_cast<Eigen::Index>(rng.below(40));
    const Eigen::Index d = 1 + static_cast<Eigen::Index>(rng.below(4));
    const Matrix points = rng.normal_matrix(n, d);
    Eigen::VectorXi arms(n);
    for (Eigen::Index i = 0; i < n; ++i) arms[i] = rng.uniform() < 0.5 ? 1 : 0;
    if (arms.sum() == 0 || arms.sum() == n) continue;
    const Vector query = rng.normal_vector(d);
    const int arm = rep % 2;
    const Eigen::Index k = 1 + static_cast<Eigen::Index>(rng.below(6));
    CHECK(effects::knn_query(points, arms, query, arm, k) ==
          test::brute_force_knn(points, arms, query, arm, k));
  }
}

TEST_CASE("build_neighbor_index: matching counts are conserved") {
  numerics::Rng rng(41, 0);
  for (int rep = 0; rep < 20; ++rep) {
    const Eigen::Index n = 30 + static_cast<Eigen::Index>(rng.below(40));
    const Matrix points = rng.normal_matrix(n, 3);
    Eigen::VectorXi arms(n);
    Eigen::Index treated = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      arms[i] = rng.uniform() < 0.4 ? 1 : 0;
      treated += arms[i];
    }
    if (treated < 2 || n - treated < 2) continue;
    const Eigen::Index want = 1 + static_cast<Eigen::Index>(rng.below(8));
    const auto index = effects::build_neighbor_index(points, arms, want, true);
    Eigen::Index sum0 = 0, sum1 = 0;
    for (Eigen::Index i = 0; i < n; ++i) (arms[i] == 1 ? sum1 : sum0) += index.k_count[i];
    CHECK(sum0 == n * index.n_effective[0]);
    CHECK(sum1 == n * index.n_effective[1]);
  }
}

TEST_CASE("estimate_mu: degenerate generator, oracle closed form, root-M scaling") {
  numerics::Rng rng(42, 0);
  {
    TableGenerator point_mass({{{0, 0}, 7.25}, {{0, 1}, 7.25}});
    Vector x = Vector::Zero(1);
    numerics::Rng r(1, 1);
    const auto mu = effects::estimate_mu(point_mass, x, Vector(), 0, 32, r);
    CHECK(mu.value == 7.25);
    CHECK(mu.std_error == 0.0);
  }
  {
    const scm::Scm m1 = scm::bench_model(scm::BenchModelKind::M1);
    effects::ScmOutcomeOracle oracle(m1);
    Vector x(5);
    x << 0.3, -1.2, 0.8, 0.4, -0.6;
    const double closed = x[0] * x[0] + x[0] * x[1] + std::exp(x[2] + 1.0) +
                          std::sin(x[3] * x[4]);
    numerics::Rng r(2, 1);
    const auto mu = effects::estimate_mu(oracle, x, Vector(), 1, 4000, r);
    CHECK(std::abs(mu.value - closed) <= 3.0 * mu.std_error);
  }
  {
    const scm::Scm m1 = scm::bench_model(scm::BenchModelKind::M1);
    effects::ScmOutcomeOracle oracle(m1);
    Vector x = Vector::Zero(5);
    double se_small = 0.0, se_large = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
      numerics::Rng ra(rep, 1), rb(rep, 2);
      se_small += effects::estimate_mu(oracle, x, Vector(), 0, 200, ra).std_error;
      se_large += effects::estimate_mu(oracle, x, Vector(), 0, 800, rb).std_error;
    }
    const double ratio = se_small / se_large;
    CHECK(ratio > 1.6);
    CHECK(ratio < 2.4);
  }
}

TEST_CASE("estimate_effects: perfect generator needs no correction") {
  numerics::Rng rng(43, 0);
  ObservationalDataset data = linear_dataset(60, rng);
  ExactLinearGenerator generator;
  effects::EstimateOptions opts;
  opts.m = 8;
  opts.n_neighbors = 3;
  const auto report = effects::estimate_effects(data, Matrix::Zero(60, 1), generator, opts);
  CHECK(report.residual.cwiseAbs().maxCoeff() < 1e-12);
  CHECK(report.tau_hat_bc == doctest::Approx(report.tau_hat).epsilon(1e-12));
  // ITE here is 3 + x0 and the report exposes it per unit
  for (Eigen::Index i = 0; i < 10; ++i)
    CHECK(report.tau_unit[i] == doctest::Approx(3.0 + data.x(i, 0)));
}

TEST_CASE("estimate_effects: constant treated-arm bias is repaired exactly") {
  numerics::Rng rng(44, 0);
  ObservationalDataset data = linear_dataset(80, rng);
  ExactLinearGenerator exact;
  effects::ShiftedOutcomeGenerator biased(exact, 0.0, 2.5);
  effects::EstimateOptions opts;
  opts.m = 4;
  opts.n_neighbors = 5;
  const auto clean = effects::estimate_effects(data, Matrix::Zero(80, 1), exact, opts);
  const auto shifted = effects::estimate_effects(data, Matrix::Zero(80, 1), biased, opts);
  CHECK(shifted.tau_hat == doctest::Approx(clean.tau_hat + 2.5).epsilon(1e-12));
  CHECK(shifted.tau_hat_bc == doctest::Approx(clean.tau_hat).epsilon(1e-10));
  // corrected per-unit ITEs recover the oracle ITEs
  for (Eigen::Index i = 0; i < data.n(); ++i)
    CHECK(shifted.tau_unit_c[i] == doctest::Approx(3.0 + data.x(i, 0)).epsilon(1e-10));
}

TEST_CASE("estimate_effects: four-unit pencil-and-paper check") {
  ObservationalDataset data;
  data.x.resize(4, 1);
  data.x << 0.0, 1.0, 10.0, 11.0;
  data.d.resize(4);
  data.d << 1, 1, 0, 0;
  data.y.resize(4);
  data.y << 5.0, 3.0, 1.0, 2.0;

  TableGenerator table({{{0, 1}, 4.0},
                        {{1, 1}, 2.0},
                        {{10, 1}, 7.0},
                        {{11, 1}, 8.0},
                        {{0, 0}, 1.0},
                        {{1, 0}, 0.0},
                        {{10, 0}, 0.5},
                        {{11, 0}, 2.5}});
  effects::EstimateOptions opts;
  opts.m = 3;
  opts.n_neighbors = 1;
  const auto report = effects::estimate_effects(data, Matrix::Zero(4, 1), table, opts);

  // residuals: (1, 1, 0.5, -0.5); neighbor sets J1 = {0},{1},{1},{1} and
  // J0 = {2},{2},{2},{3}; K = (1, 3, 3, 1)
  CHECK(report.k_count[0] == 1);
  CHECK(report.k_count[1] == 3);
  CHECK(report.k_count[2] == 3);
  CHECK(report.k_count[3] == 1);
  CHECK(report.tau_hat == doctest::Approx(4.25));
  CHECK(report.tau_hat_bc == doctest::Approx(5.0));
  CHECK(report.tau_hat_bc_closed == doctest::Approx(5.0));
  const Vector expected_tau_c = (Vector(4) << 3.5, 2.5, 7.0, 7.0).finished();
  CHECK((report.tau_unit_c - expected_tau_c).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("estimate_effects: the closed form matches the per-unit mean to 1e-10") {
  numerics::Rng rng(45, 0);
  const scm::Scm m1 = scm::bench_model(scm::BenchModelKind::M1);
  effects::ScmOutcomeOracle oracle(m1);
  for (int rep = 0; rep < 100; ++rep) {
    const Eigen::Index n = 10 + static_cast<Eigen::Index>(rng.below(41));
    numerics::Rng sim_rng(rep, 5);
    const auto sim = scm::simulate(m1, n, sim_rng);
    if (sim.dataset.arm_size(0) == 0 || sim.dataset.arm_size(1) == 0) continue;
    effects::EstimateOptions opts;
    opts.m = 3;
    opts.n_neighbors = 1 + static_cast<Eigen::Index>(rng.below(12));  // may exceed an arm
    opts.seed = rep;
    const auto report =
        effects::estimate_effects(sim.dataset, Matrix::Zero(n, 1), oracle, opts);
    CHECK(std::abs(report.tau_hat_bc - report.tau_hat_bc_closed) < 1e-10);
    if (opts.n_neighbors > std::min(sim.dataset.arm_size(0), sim.dataset.arm_size(1)))
      CHECK_FALSE(report.warnings.empty());
  }
}

TEST_CASE("estimate_effects: permuting rows permutes units and keeps aggregates bitwise") {
  numerics::Rng rng(46, 0);
  const scm::Scm m1 = scm::bench_model(scm::BenchModelKind::M1);
  effects::ScmOutcomeOracle oracle(m1);
  const auto sim = scm::simulate(m1, 40, rng);
  const Eigen::Index n = 40;
  Matrix proxy = rng.normal_matrix(n, 2);
  effects::EstimateOptions opts;
  opts.m = 16;
  opts.n_neighbors = 4;
  opts.seed = 99;
  const auto base = effects::estimate_effects(sim.dataset, proxy, oracle, opts);

  // reversed row order with the proxy permuted alongside
  ObservationalDataset permuted;
  permuted.x.resize(n, sim.dataset.p());
  permuted.d.resize(n);
  permuted.y.resize(n);
  Matrix proxy_perm(n, proxy.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    permuted.x.row(i) = sim.dataset.x.row(n - 1 - i);
    permuted.d[i] = sim.dataset.d[n - 1 - i];
    permuted.y[i] = sim.dataset.y[n - 1 - i];
    proxy_perm.row(i) = proxy.row(n - 1 - i);
  }
  const auto flipped = effects::estimate_effects(permuted, proxy_perm, oracle, opts);

  CHECK(flipped.tau_hat == base.tau_hat);
  CHECK(flipped.tau_hat_bc == base.tau_hat_bc);
  for (Eigen::Index i = 0; i < n; ++i) {
    CHECK(flipped.mu0[i] == base.mu0[n - 1 - i]);
    CHECK(flipped.mu1[i] == base.mu1[n - 1 - i]);
    CHECK(flipped.tau_unit_c[i] == base.tau_unit_c[n - 1 - i]);
    CHECK(flipped.k_count[i] == base.k_count[n - 1 - i]);
  }
}

TEST_CASE("estimate_dag_total_effect: oracle generator reproduces the path sum exactly") {
  Matrix v = Matrix::Zero(4, 4);
  v(1, 3) = 1.0;
  v(1, 2) = 0.5;
  v(2, 3) = 2.0;
  const scm::Scm model = scm::bench_model(scm::BenchModel::linear(v));
  const std::vector<int> order = model.dag.topological_order();

  numerics::Rng rng(47, 0);
  const auto sim = scm::simulate(model, 200, rng);
  const effects::ScmDagOracle oracle(model, order, 1, 3);
  effects::DagEffectOptions opts;
  opts.m = 50;
  opts.seed = 7;
  const auto result = effects::estimate_dag_total_effect(
      sim.observed, order, 1, 3, 1.0, 0.0, Matrix::Zero(200, 4), oracle, opts);
  // linear SCM with shared draws: every unit contrast collapses to the path sum
  CHECK(result.tau_hat == doctest::Approx(2.0).epsilon(1e-12));

  const auto zero = effects::estimate_dag_total_effect(
      sim.observed, order, 1, 3, 0.7, 0.7, Matrix::Zero(200, 4), oracle, opts);
  CHECK(zero.tau_hat == 0.0);

  CHECK_THROWS(effects::estimate_dag_total_effect(sim.observed, order, 3, 1, 1.0, 0.0,
                                                  Matrix::Zero(200, 4), oracle, opts));
}

TEST_CASE("estimate_dag_total_effect: nonlinear model agrees with the do-oracle") {
  const scm::Scm model = scm::bench_model(scm::BenchModelKind::NonlinSimpson);
  const auto kind = scm::BenchModelKind::NonlinSimpson;
  scm::InterventionQuery query = scm::default_query(model, kind);
  query.draws = 400000;
  numerics::Rng oracle_rng(48, 0);
  const auto truth = scm::do_total_effect(model, query, oracle_rng);

  numerics::Rng rng(48, 1);
  const auto sim = scm::simulate(model, 400, rng);
  const std::vector<int> order = model.dag.topological_order();
  const effects::ScmDagOracle generator(model, order, query.source, query.target);
  effects::DagEffectOptions opts;
  opts.m = 200;
  opts.seed = 11;
  const auto result =
      effects::estimate_dag_total_effect(sim.observed, order, query.source, query.target,
                                         query.x1, query.x0, Matrix::Zero(400, 4), generator,
                                         opts);
  CHECK(std::abs(result.tau_hat - truth.value) < 0.1);
}

TEST_CASE("effect report: csv and summary writers") {
  numerics::Rng rng(49, 0);
  ObservationalDataset data = linear_dataset(20, rng);
  ExactLinearGenerator generator;
  effects::EstimateOptions opts;
  opts.m = 2;
  opts.n_neighbors = 2;
  const auto report = effects::estimate_effects(data, Matrix::Zero(20, 1), generator, opts);

  const std::string dir = "effects_report_test_out";
  effects::write_effect_report_csv(report, data, dir + ".csv");
  effects::write_effect_report_summary(report, dir + ".json");
  const std::string summary = effects::effect_report_summary_json(report);
  CHECK(summary.find("tau_hat") != std::string::npos);
  CHECK(summary.find("tau_hat_bc") != std::string::npos);
}
