#pragma once

#include <Eigen/Dense>
#include <stdexcept>

#include "actmine/types.hpp"

namespace actmine {

struct MaskParams {
  double tau = 0.5;  // discounting threshold in (0, 1]

  void validate() const {
    if (!(tau > 0.0 && tau <= 1.0))
      throw ValidationError("tau must be in (0, 1]");
  }
};

constexpr double kProbFloor = 1e-12;
constexpr double kDegenerateRange = 1e-12;

// Row-wise softmax with per-row max subtraction.
template <typename Derived>
Matrix softmax_rows(const Eigen::MatrixBase<Derived> &phi) {
  Matrix p(phi.rows(), phi.cols());
  for (Eigen::Index i = 0; i < phi.rows(); ++i) {
    const double m = phi.row(i).maxCoeff();
    p.row(i) = (phi.row(i).array() - m).exp();
    p.row(i) /= p.row(i).sum();
  }
  return p;
}

// Rescale of the min-max normalized response: 1 above the discounting
// threshold, proportional below. Continuous at x == tau.
inline double delta_tau(double x, const MaskParams &params) {
  params.validate();
  if (!(x >= 0.0 && x <= 1.0))
    throw std::domain_error("delta_tau input outside [0, 1]");
  return x > params.tau ? 1.0 : x / params.tau;
}

// Column-wise min-max normalization followed by delta_tau. The matrix passed
// in defines the normalization pool: callers hand the visible-row submatrix
// during training and the full video at test time. Columns with no spread
// carry no evidence and map to an all-zero mask.
template <typename Derived>
MaskMatrix soft_mask(const Eigen::MatrixBase<Derived> &phi,
                     const MaskParams &params) {
  params.validate();
  MaskMatrix alpha = MaskMatrix::Zero(phi.rows(), phi.cols());
  for (Eigen::Index j = 0; j < phi.cols(); ++j) {
    const double lo = phi.col(j).minCoeff();
    const double hi = phi.col(j).maxCoeff();
    const double range = hi - lo;
    if (range < kDegenerateRange) continue;
    for (Eigen::Index i = 0; i < phi.rows(); ++i) {
      const double x = (phi(i, j) - lo) / range;
      alpha(i, j) = x > params.tau ? 1.0 : x / params.tau;
    }
  }
  return alpha;
}

// Erasing odds: elementwise product of mask and category probability.
template <typename DerivedA, typename DerivedP>
Matrix erasing_odds(const Eigen::MatrixBase<DerivedA> &alpha,
                    const Eigen::MatrixBase<DerivedP> &p) {
  if (alpha.rows() != p.rows() || alpha.cols() != p.cols())
    throw ValidationError("erasing_odds: shape mismatch");
  return alpha.cwiseProduct(p);
}

}  // namespace actmine
