#pragma once

#include <utility>
#include <vector>

#include "actmine/crf.hpp"
#include "actmine/types.hpp"

namespace actmine {

struct DetectConfig {
  double threshold = 0.5;
  int merge_gap = 0;  // runs separated by <= merge_gap false snippets join

  void validate() const {
    if (!(threshold > 0.0 && threshold < 1.0))
      throw ValidationError("threshold must be in (0, 1)");
    if (merge_gap < 0) throw ValidationError("merge_gap must be >= 0");
  }
};

// selected(i, j) = alpha_bar(i, j) * p_tilde(i, j) > threshold (strict).
Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> select_clips(
    const MaskMatrix &alpha_bar, const Marginals &p_tilde,
    const DetectConfig &cfg);

// Maximal runs of true values as inclusive intervals, gap-bridged.
std::vector<std::pair<int, int>> merge_segments(const std::vector<bool> &mask,
                                                const DetectConfig &cfg);

// Per class: select, merge, and emit segments with confidence = mean of
// s-tilde over the member snippets.
std::vector<DetectionSegment> make_detections(const VideoRecord &video,
                                              const MaskMatrix &alpha_bar,
                                              const Marginals &p_tilde,
                                              const DetectConfig &cfg);

}  // namespace actmine
