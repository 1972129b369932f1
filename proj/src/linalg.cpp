#include "acee/numerics/linalg.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/SVD>

namespace acee::numerics {

bool all_finite(const Matrix& m) { return m.allFinite(); }

TruncatedSvd svd_truncated(const Matrix& m, Eigen::Index q) {
  if (q <= 0) throw std::invalid_argument("svd_truncated: q must be >= 1");
  if (q > std::min(m.rows(), m.cols()))
    throw std::invalid_argument("svd_truncated: q exceeds min(rows, cols)");
  if (!m.allFinite()) throw std::invalid_argument("svd_truncated: non-finite input");

  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success)
    throw std::runtime_error("svd_truncated: SVD failed to converge");

  TruncatedSvd out;
  out.u = svd.matrixU().leftCols(q);
  out.v = svd.matrixV().leftCols(q);
  out.sigma = svd.singularValues().head(q);

  // fix signs: largest-magnitude entry of each V column positive
  for (Eigen::Index k = 0; k < q; ++k) {
    Eigen::Index imax = 0;
    out.v.col(k).cwiseAbs().maxCoeff(&imax);
    if (out.v(imax, k) < 0.0) {
      out.v.col(k) = -out.v.col(k);
      out.u.col(k) = -out.u.col(k);
    }
  }
  return out;
}

LeastSquaresResult least_squares(const Matrix& a, const Vector& b) {
  if (a.rows() != b.size()) throw std::invalid_argument("least_squares: shape mismatch");
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(a);
  LeastSquaresResult res;
  res.coef = cod.solve(b);
  res.rank_deficient = cod.rank() < a.cols();
  return res;
}

Vector regress_out(const Matrix& a, const Vector& b, bool* rank_deficient) {
  LeastSquaresResult fit = least_squares(a, b);
  if (rank_deficient) *rank_deficient = fit.rank_deficient;
  return b - a * fit.coef;
}

double pearson_corr(const Vector& a, const Vector& b) {
  if (a.size() != b.size() || a.size() < 2)
    throw std::invalid_argument("pearson_corr: need two equally sized vectors");
  const Vector ac = a.array() - a.mean();
  const Vector bc = b.array() - b.mean();
  const double denom = std::sqrt(ac.squaredNorm() * bc.squaredNorm());
  if (denom <= 0.0) return 0.0;
  return ac.dot(bc) / denom;
}

}  // namespace acee::numerics
