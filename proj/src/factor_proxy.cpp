#include "acee/proxy/factor_proxy.hpp"

#include <cmath>
#include <stdexcept>

namespace acee::proxy {

using numerics::Matrix;
using numerics::Vector;

namespace {

struct Standardized {
  Matrix z;
  Vector mean;
  Vector scale;
};

Standardized standardize_columns(const Matrix& z, const std::vector<std::string>& names) {
  if (z.rows() < 2) throw std::invalid_argument("factor fit: need at least two rows");
  Standardized out;
  out.mean = z.colwise().mean();
  out.z = z.rowwise() - out.mean.transpose();
  out.scale.resize(z.cols());
  for (Eigen::Index c = 0; c < z.cols(); ++c) {
    const double var = out.z.col(c).squaredNorm() / static_cast<double>(z.rows() - 1);
    if (var <= 0.0)
      throw std::runtime_error("factor fit: column " +
                               (c < static_cast<Eigen::Index>(names.size())
                                    ? names[c]
                                    : std::to_string(c)) +
                               " is constant; rank-deficient input");
    out.scale[c] = std::sqrt(var);
    out.z.col(c) /= out.scale[c];
  }
  return out;
}

}  // namespace

Vector FactorProxy::s_y() const {
  if (y_col < 0) throw std::logic_error("FactorProxy: Y was not included in the fit");
  return s_hat.col(y_col);
}

Matrix FactorProxy::s_minus_y() const {
  if (y_col < 0) return s_hat;
  Matrix out(s_hat.rows(), s_hat.cols() - 1);
  Eigen::Index at = 0;
  for (Eigen::Index c = 0; c < s_hat.cols(); ++c)
    if (c != y_col) out.col(at++) = s_hat.col(c);
  return out;
}

Matrix FactorProxy::proxy_columns() const { return s_hat; }

FactorProxy fit_factor_proxy(const effects::ObservationalDataset& dataset, Eigen::Index q,
                             IncludeFlags include) {
  const Eigen::Index n = dataset.n();
  if (!include.x && !include.d && !include.y)
    throw std::invalid_argument("fit_factor_proxy: nothing included");

  FactorProxy out;
  Eigen::Index cols = (include.x ? dataset.p() : 0) + (include.d ? 1 : 0) + (include.y ? 1 : 0);
  if (q < 1 || q > cols)
    throw std::invalid_argument("fit_factor_proxy: q must satisfy 1 <= q <= column count");
  if (n < q) throw std::invalid_argument("fit_factor_proxy: fewer rows than rank");

  Matrix z(n, cols);
  Eigen::Index at = 0;
  if (include.x) {
    z.leftCols(dataset.p()) = dataset.x;
    for (Eigen::Index c = 0; c < dataset.p(); ++c)
      out.column_names.push_back(dataset.column_names.empty()
                                     ? "x" + std::to_string(c + 1)
                                     : dataset.column_names[c]);
    at = dataset.p();
  }
  if (include.d) {
    if (dataset.d.size() != n) throw std::invalid_argument("fit_factor_proxy: missing D");
    z.col(at) = dataset.d.cast<double>();
    out.d_col = static_cast<int>(at);
    out.column_names.push_back("d");
    ++at;
  }
  if (include.y) {
    if (dataset.y.size() != n) throw std::invalid_argument("fit_factor_proxy: missing Y");
    z.col(at) = dataset.y;
    out.y_col = static_cast<int>(at);
    out.column_names.push_back("y");
  }
  if (!z.allFinite()) throw std::invalid_argument("fit_factor_proxy: non-finite input");

  Standardized st = standardize_columns(z, out.column_names);
  const auto svd = numerics::svd_truncated(st.z, std::min(st.z.rows(), st.z.cols()));

  out.q = q;
  const double root_n = std::sqrt(static_cast<double>(n));
  out.phi_hat = root_n * svd.u.leftCols(q);
  out.psi_hat = svd.v.leftCols(q) * svd.sigma.head(q).asDiagonal() / root_n;
  out.s_hat_std = out.phi_hat * out.psi_hat.transpose();
  out.s_hat = (out.s_hat_std * st.scale.asDiagonal()).rowwise() + st.mean.transpose();
  out.z_std = std::move(st.z);
  out.col_mean = std::move(st.mean);
  out.col_scale = std::move(st.scale);
  out.singular_values = svd.sigma;
  return out;
}

ResidualProxy fit_residual_proxy(const Matrix& x, Eigen::Index q) {
  if (q < 1 || q > x.cols())
    throw std::invalid_argument("fit_residual_proxy: q must satisfy 1 <= q <= p");
  if (x.rows() < q) throw std::invalid_argument("fit_residual_proxy: fewer rows than rank");
  if (!x.allFinite()) throw std::invalid_argument("fit_residual_proxy: non-finite input");

  std::vector<std::string> names;
  for (Eigen::Index c = 0; c < x.cols(); ++c) names.push_back("x" + std::to_string(c + 1));
  Standardized st = standardize_columns(x, names);
  const auto svd = numerics::svd_truncated(st.z, q);

  ResidualProxy out;
  out.q = q;
  Matrix recon_std = svd.reconstruction();
  out.reconstruction = (recon_std * st.scale.asDiagonal()).rowwise() + st.mean.transpose();
  out.s_hat_resid = x - out.reconstruction;
  return out;
}

DiagnosticResult proxy_sufficiency_diagnostic(const effects::ObservationalDataset& dataset,
                                              const FactorProxy& proxy, Eigen::Index permutations,
                                              numerics::Rng& rng) {
  if (permutations < 99)
    throw std::invalid_argument("proxy_sufficiency_diagnostic: need >= 99 permutations");
  if (proxy.s_hat.rows() != dataset.n())
    throw std::invalid_argument("proxy_sufficiency_diagnostic: proxy does not match dataset");
  if (proxy.y_col < 0)
    throw std::invalid_argument("proxy_sufficiency_diagnostic: proxy must include Y");

  const Eigen::Index n = dataset.n();
  const Vector s_y = proxy.s_y();
  const Vector resid = dataset.y - s_y;

  // The rank-q residual matrix Z - S obeys (Z - S) v = 0 for every trailing
  // right-singular direction v, which makes Y - S_Y an exact linear
  // combination of the X and D residual columns. Conditioning either side
  // on S_{-Y} therefore annihilates the statistic identically, and the
  // linear probe S_Y itself carries the mechanical Y-into-S_Y leakage of
  // the factor fit. What remains testable is whether the residual shows a
  // nonlinear pattern in S_Y: both sides are adjusted for (1, X, D) and the
  // probe is the squared proxy column.
  Matrix adjust(n, 1 + dataset.p() + 1);
  adjust.col(0).setOnes();
  adjust.middleCols(1, dataset.p()) = dataset.x;
  adjust.col(adjust.cols() - 1) = dataset.d.cast<double>();

  DiagnosticResult out;
  out.permutations = permutations;
  bool deficient = false;
  Vector r1 = numerics::regress_out(adjust, resid, &deficient);
  bool probe_deficient = false;
  Vector r2 =
      numerics::regress_out(adjust, Vector(s_y.array().square().matrix()), &probe_deficient);
  if (deficient || probe_deficient)
    out.warnings.push_back("collinear adjustment matrix; minimum-norm pseudo-inverse used");

  const double eps = 1e-12 * static_cast<double>(n);
  if (r1.squaredNorm() <= eps ||
      r2.squaredNorm() <= eps * std::max(1.0, s_y.squaredNorm())) {
    out.statistic = 0.0;  // constant or fully explained proxy column
    out.p_value = 1.0;
    return out;
  }

  out.statistic = std::abs(numerics::pearson_corr(r1, r2));

  std::vector<double> shuffled(r1.data(), r1.data() + n);
  Eigen::Index at_least = 0;
  for (Eigen::Index b = 0; b < permutations; ++b) {
    rng.shuffle(shuffled);
    const double stat =
        std::abs(numerics::pearson_corr(Eigen::Map<const Vector>(shuffled.data(), n), r2));
    if (stat >= out.statistic) ++at_least;
  }
  out.p_value = static_cast<double>(1 + at_least) / static_cast<double>(permutations + 1);
  return out;
}

}  // namespace acee::proxy
