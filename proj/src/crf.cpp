#include "actmine/crf.hpp"

#include <cmath>

#include "actmine/scoring.hpp"

namespace actmine {

namespace {

int kernel_radius(const CrfConfig &cfg, Eigen::Index n) {
  if (cfg.kernel_mode == KernelMode::kNaive) return static_cast<int>(n - 1);
  const int r = static_cast<int>(std::ceil(cfg.radius_multiplier * cfg.sigma));
  return std::min<int>(r, static_cast<int>(n - 1));
}

}  // namespace

double gibbs_energy(const std::vector<int> &labels,
                    const ProbabilityMatrix &unary_p, const CrfConfig &cfg) {
  cfg.validate();
  const Eigen::Index n = unary_p.rows();
  if (static_cast<Eigen::Index>(labels.size()) != n)
    throw ValidationError("gibbs_energy: label count != N");
  double energy = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const int l = labels[i];
    if (l < 0 || l >= unary_p.cols())
      throw ValidationError("gibbs_energy: label out of range");
    energy += -std::log(std::max(unary_p(i, l), kProbFloor));
  }
  const double inv2s2 = 1.0 / (2.0 * cfg.sigma * cfg.sigma);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j || labels[i] == labels[j]) continue;
      const double d = static_cast<double>(i - j);
      energy += cfg.omega * std::exp(-d * d * inv2s2);
    }
  return energy;
}

Matrix pairwise_message(const Marginals &q, const CrfConfig &cfg) {
  cfg.validate();
  const Eigen::Index n = q.rows();
  const Eigen::Index c = q.cols();
  const int radius = kernel_radius(cfg, n);
  const double inv2s2 = 1.0 / (2.0 * cfg.sigma * cfg.sigma);

  // M(i, l) = omega * sum_d k(d) * (1 - Q(i +- d, l)); accumulate shifted
  // row blocks per offset instead of the quadratic pairwise loop.
  Matrix acc = Matrix::Zero(n, c);     // sum_j k * Q(j, l)
  Vector kmass = Vector::Zero(n);      // sum_j k
  for (int d = 1; d <= radius; ++d) {
    const double k = std::exp(-static_cast<double>(d) * d * inv2s2);
    acc.block(d, 0, n - d, c) += k * q.block(0, 0, n - d, c);
    acc.block(0, 0, n - d, c) += k * q.block(d, 0, n - d, c);
    kmass.segment(d, n - d).array() += k;
    kmass.segment(0, n - d).array() += k;
  }
  return cfg.omega * (kmass.replicate(1, c) - acc);
}

Marginals mean_field_refine(const ProbabilityMatrix &unary_p,
                            const CrfConfig &cfg) {
  cfg.validate();
  // exact fixed point, and keeps the no-CRF arm bit-identical to omega == 0
  if (cfg.omega == 0.0) return unary_p;

  Marginals q = unary_p;
  for (int it = 0; it < cfg.max_iters; ++it) {
    const Matrix msg = pairwise_message(q, cfg);
    Marginals next(q.rows(), q.cols());
    for (Eigen::Index i = 0; i < q.rows(); ++i) {
      // renormalize against the row's message minimum so exp stays bounded
      const double m0 = msg.row(i).minCoeff();
      next.row(i) = unary_p.row(i).array() * (-(msg.row(i).array() - m0)).exp();
      next.row(i) /= next.row(i).sum();
    }
    const double delta = (next - q).cwiseAbs().maxCoeff();
    q = std::move(next);
    if (delta < cfg.tol) break;
  }
  return q;
}

std::vector<int> map_labels(const Marginals &q) {
  std::vector<int> labels(q.rows());
  for (Eigen::Index i = 0; i < q.rows(); ++i) {
    int best = 0;
    for (Eigen::Index l = 1; l < q.cols(); ++l)
      if (q(i, l) > q(i, best)) best = static_cast<int>(l);
    labels[i] = best;
  }
  return labels;
}

}  // namespace actmine
