#pragma once

#include <vector>

#include "actmine/provider.hpp"
#include "actmine/scoring.hpp"
#include "actmine/types.hpp"

namespace actmine {

struct FusedOutputs {
  MaskMatrix avg_mask;        // alpha-bar
  ProbabilityMatrix fused_p;  // p-bar
  Matrix confidence;          // s-bar = alpha-bar (*) p-bar
};

// Arithmetic mean of the per-step masks.
MaskMatrix average_mask(const std::vector<MaskMatrix> &masks);

// Row-normalized product of the T distributions: softmax of summed logs,
// entries floored before the logarithm.
ProbabilityMatrix fuse_probabilities(const std::vector<ProbabilityMatrix> &ps);

// Test-time collection: score every classifier on the full video, build
// per-step probabilities and masks (min-max over all N rows), fuse.
FusedOutputs collect(const VideoRecord &video,
                     const std::vector<ClassifierHandle> &handles,
                     const ScoreProvider &provider, const MaskParams &mask,
                     bool use_mask = true);

}  // namespace actmine
