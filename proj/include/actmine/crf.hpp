#pragma once

#include <vector>

#include "actmine/types.hpp"

namespace actmine {

enum class KernelMode { kNaive, kTruncated };

struct CrfConfig {
  double omega = 1.0;     // pairwise weight, >= 0
  double sigma = 1.0;     // gaussian kernel scale in snippet-index units, > 0
  int max_iters = 10;
  double tol = 1e-5;      // max-abs marginal change for early stop
  KernelMode kernel_mode = KernelMode::kTruncated;
  double radius_multiplier = 4.0;  // truncation at ceil(multiplier * sigma)

  void validate() const {
    if (omega < 0.0) throw ValidationError("omega must be >= 0");
    if (!(sigma > 0.0)) throw ValidationError("sigma must be > 0");
    if (max_iters < 1) throw ValidationError("max_iters must be >= 1");
    if (!(radius_multiplier > 0.0))
      throw ValidationError("radius_multiplier must be > 0");
  }
};

using Marginals = ProbabilityMatrix;

// Gibbs energy of a label assignment: unary -log p plus the Potts pairwise
// term summed over ordered pairs (each unordered pair counted twice).
double gibbs_energy(const std::vector<int> &labels,
                    const ProbabilityMatrix &unary_p, const CrfConfig &cfg);

// Expected pairwise energy under Q: M(i, l) = omega * sum_{j != i} k(i, j) *
// (1 - Q(j, l)). Truncated mode sums only |i - j| <= ceil(multiplier * sigma).
Matrix pairwise_message(const Marginals &q, const CrfConfig &cfg);

// Synchronous mean-field sweeps from Q = unary, renormalizing each sweep.
// omega == 0 returns the unary unchanged (exact fixed point).
Marginals mean_field_refine(const ProbabilityMatrix &unary_p,
                            const CrfConfig &cfg);

// Per-node argmax of the marginals, ties to the lowest class index.
std::vector<int> map_labels(const Marginals &q);

}  // namespace actmine
