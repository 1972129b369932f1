#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace acee::numerics {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct TruncatedSvd {
  Matrix u;        // rows x q, orthonormal columns
  Vector sigma;    // q nonincreasing, nonnegative
  Matrix v;        // cols x q, orthonormal columns
  Matrix reconstruction() const { return u * sigma.asDiagonal() * v.transpose(); }
};

// Best rank-q approximation factors of m. Sign convention: within each column
// of v the entry of largest magnitude is positive, which makes the
// decomposition (and everything downstream of it) unique and reproducible.
TruncatedSvd svd_truncated(const Matrix& m, Eigen::Index q);

struct LeastSquaresResult {
  Vector coef;
  bool rank_deficient = false;  // solved through a pseudo-inverse
};

// Minimum-norm solution of min ||a x - b||_2. Rank deficiency is reported
// rather than thrown; callers decide whether to warn.
LeastSquaresResult least_squares(const Matrix& a, const Vector& b);

// Residuals of b after projecting out the column space of a.
Vector regress_out(const Matrix& a, const Vector& b, bool* rank_deficient = nullptr);

double pearson_corr(const Vector& a, const Vector& b);

bool all_finite(const Matrix& m);

}  // namespace acee::numerics
