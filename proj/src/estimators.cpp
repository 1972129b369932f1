#include "acee/effects/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace acee::effects {

using numerics::Matrix;
using numerics::Rng;
using numerics::Vector;

MuEstimate estimate_mu(const OutcomeGenerator& generator, const Vector& x, const Vector& s, int d,
                       Eigen::Index m, Rng& rng) {
  if (m < 1) throw std::invalid_argument("estimate_mu: M must be >= 1");
  const Vector draws = generator.draw(x, s, d, m, rng);
  MuEstimate est;
  est.value = draws.mean();
  if (m > 1) {
    const double ss = (draws.array() - est.value).square().sum();
    est.std_error = std::sqrt(ss / static_cast<double>(m - 1) / static_cast<double>(m));
  }
  return est;
}

namespace {

// content key per unit; drives sampling streams and the canonical summation
// order so results are invariant to row permutations
std::vector<std::uint64_t> unit_keys(const ObservationalDataset& dataset) {
  std::vector<std::uint64_t> keys(dataset.n());
  std::vector<double> buf(dataset.p() + 2);
  for (Eigen::Index i = 0; i < dataset.n(); ++i) {
    for (Eigen::Index c = 0; c < dataset.p(); ++c) buf[c] = dataset.x(i, c);
    buf[dataset.p()] = static_cast<double>(dataset.d[i]);
    buf[dataset.p() + 1] = dataset.y[i];
    keys[i] = numerics::hash_bytes(buf.data(), buf.size());
  }
  return keys;
}

std::vector<Eigen::Index> canonical_order(const std::vector<std::uint64_t>& keys) {
  std::vector<Eigen::Index> idx(keys.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
    return keys[a] != keys[b] ? keys[a] < keys[b] : a < b;
  });
  return idx;
}

double ordered_mean(const Vector& values, const std::vector<Eigen::Index>& order) {
  double sum = 0.0;
  for (Eigen::Index i : order) sum += values[i];
  return sum / static_cast<double>(values.size());
}

// per-column standardization of the neighbor metric space; constant columns
// pass through unscaled
Matrix standardized_metric_space(const Matrix& m) {
  Matrix out = m.rowwise() - m.colwise().mean();
  for (Eigen::Index c = 0; c < out.cols(); ++c) {
    const double var = out.col(c).squaredNorm() / std::max<double>(1.0, out.rows() - 1);
    if (var > 0.0) out.col(c) /= std::sqrt(var);
  }
  return out;
}

Eigen::Index default_neighbors(Eigen::Index n) {
  return static_cast<Eigen::Index>(std::ceil(std::pow(static_cast<double>(n), 0.4)));
}

}  // namespace

EffectReport estimate_effects(const ObservationalDataset& dataset, const Matrix& proxy_columns,
                              const OutcomeGenerator& generator, const EstimateOptions& options) {
  dataset.validate_for_effects();
  const Eigen::Index n = dataset.n();
  if (proxy_columns.rows() != n)
    throw std::invalid_argument("estimate_effects: proxy rows do not align with dataset");
  if (options.m < 1) throw std::invalid_argument("estimate_effects: M must be >= 1");

  EffectReport report;
  report.m = options.m;
  report.seed = options.seed;
  report.proxy_rank = options.proxy_rank;

  Eigen::Index want_n = options.n_neighbors > 0 ? options.n_neighbors : default_neighbors(n);

  // neighbor metric: standardized [X, S]
  Matrix space(n, dataset.p() + proxy_columns.cols());
  space.leftCols(dataset.p()) = dataset.x;
  space.rightCols(proxy_columns.cols()) = proxy_columns;
  report.neighbors =
      build_neighbor_index(standardized_metric_space(space), dataset.d, want_n,
                           options.include_self);
  if (report.neighbors.clipped)
    report.warnings.push_back("N clipped to arm size: using N0=" +
                              std::to_string(report.neighbors.n_effective[0]) +
                              ", N1=" + std::to_string(report.neighbors.n_effective[1]));
  report.n_neighbors = want_n;
  report.k_count =
      Eigen::Map<const Eigen::VectorXi>(report.neighbors.k_count.data(), n);

  const std::vector<std::uint64_t> keys = unit_keys(dataset);
  report.mu0.resize(n);
  report.mu1.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vector xi = dataset.x.row(i).transpose();
    const Vector si = proxy_columns.row(i).transpose();
    for (int d = 0; d < 2; ++d) {
      Rng rng = Rng(options.seed, keys[i]).substream(static_cast<std::uint64_t>(d) + 1);
      const MuEstimate mu = estimate_mu(generator, xi, si, d, options.m, rng);
      (d == 0 ? report.mu0 : report.mu1)[i] = mu.value;
    }
  }

  report.residual.resize(n);
  for (Eigen::Index i = 0; i < n; ++i)
    report.residual[i] = dataset.y[i] - (dataset.d[i] == 1 ? report.mu1[i] : report.mu0[i]);

  report.mu0_c.resize(n);
  report.mu1_c.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double sum0 = 0.0, sum1 = 0.0;
    for (int j : report.neighbors.neighbors0[i]) sum0 += report.residual[j];
    for (int j : report.neighbors.neighbors1[i]) sum1 += report.residual[j];
    report.mu0_c[i] = report.mu0[i] + sum0 / static_cast<double>(report.neighbors.n_effective[0]);
    report.mu1_c[i] = report.mu1[i] + sum1 / static_cast<double>(report.neighbors.n_effective[1]);
  }

  report.tau_unit = report.mu1 - report.mu0;
  report.tau_unit_c = report.mu1_c - report.mu0_c;

  const std::vector<Eigen::Index> order = canonical_order(keys);
  report.tau_hat = ordered_mean(report.tau_unit, order);
  report.tau_hat_bc = ordered_mean(report.tau_unit_c, order);

  // closed form: tau_hat + (1/n) [sum_{D=1} (K/N1) R - sum_{D=0} (K/N0) R]
  double corr = 0.0;
  for (Eigen::Index i : order) {
    const double w = static_cast<double>(report.k_count[i]) /
                     static_cast<double>(report.neighbors.n_effective[dataset.d[i]]);
    corr += (dataset.d[i] == 1 ? 1.0 : -1.0) * w * report.residual[i];
  }
  report.tau_hat_bc_closed = report.tau_hat + corr / static_cast<double>(n);
  return report;
}

DagEffectResult estimate_dag_total_effect(const Matrix& x, const std::vector<int>& order, int k,
                                          int j, double x1, double x0,
                                          const Matrix& residual_proxy,
                                          const DagNodeGenerator& generator,
                                          const DagEffectOptions& options) {
  const Eigen::Index n = x.rows();
  const int p = static_cast<int>(x.cols());
  if (static_cast<int>(order.size()) != p)
    throw std::invalid_argument("dag effect: order must cover every column");
  {
    std::vector<char> seen(p, 0);
    for (int v : order) {
      if (v < 0 || v >= p || seen[v]) throw std::invalid_argument("dag effect: invalid order");
      seen[v] = 1;
    }
  }
  Eigen::Index pos_k = -1, pos_j = -1;
  for (Eigen::Index t = 0; t < p; ++t) {
    if (order[t] == k) pos_k = t;
    if (order[t] == j) pos_j = t;
  }
  if (pos_k < 0 || pos_j < 0) throw std::invalid_argument("dag effect: k or j not in order");
  if (pos_k >= pos_j) throw std::invalid_argument("dag effect: k must precede j in the order");
  if (residual_proxy.rows() != n)
    throw std::invalid_argument("dag effect: proxy rows do not align with data");
  if (options.m < 1) throw std::invalid_argument("dag effect: M must be >= 1");

  std::vector<std::uint64_t> keys(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vector row = x.row(i).transpose();
    keys[i] = numerics::hash_bytes(row.data(), static_cast<std::size_t>(row.size()));
  }

  DagEffectResult result;
  result.m = options.m;
  result.seed = options.seed;
  result.unit_contrasts.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Vector x_kminus(pos_k);
    for (Eigen::Index t = 0; t < pos_k; ++t) x_kminus[t] = x(i, order[t]);
    const Vector s_row = residual_proxy.row(i).transpose();
    // identical streams for the two arms: common random numbers
    Rng rng_a = Rng(options.seed, keys[i]).substream(1);
    Rng rng_b = Rng(options.seed, keys[i]).substream(1);
    const double mean1 = generator.draw(s_row, x_kminus, x1, options.m, rng_a).mean();
    const double mean0 = generator.draw(s_row, x_kminus, x0, options.m, rng_b).mean();
    result.unit_contrasts[i] = mean1 - mean0;
  }

  std::vector<Eigen::Index> corder(n);
  std::iota(corder.begin(), corder.end(), 0);
  std::sort(corder.begin(), corder.end(), [&](Eigen::Index a, Eigen::Index b) {
    return keys[a] != keys[b] ? keys[a] < keys[b] : a < b;
  });
  double sum = 0.0;
  for (Eigen::Index i : corder) sum += result.unit_contrasts[i];
  result.tau_hat = sum / static_cast<double>(n);
  return result;
}

}  // namespace acee::effects
