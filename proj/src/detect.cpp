#include "actmine/detect.hpp"

namespace actmine {

Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> select_clips(
    const MaskMatrix &alpha_bar, const Marginals &p_tilde,
    const DetectConfig &cfg) {
  cfg.validate();
  if (alpha_bar.rows() != p_tilde.rows() || alpha_bar.cols() != p_tilde.cols())
    throw ValidationError("select_clips: shape mismatch");
  return (alpha_bar.array() * p_tilde.array()) > cfg.threshold;
}

std::vector<std::pair<int, int>> merge_segments(const std::vector<bool> &mask,
                                                const DetectConfig &cfg) {
  cfg.validate();
  std::vector<std::pair<int, int>> runs;
  const int n = static_cast<int>(mask.size());
  int i = 0;
  while (i < n) {
    if (!mask[i]) {
      ++i;
      continue;
    }
    int end = i;
    while (end + 1 < n && mask[end + 1]) ++end;
    if (!runs.empty() && i - runs.back().second - 1 <= cfg.merge_gap)
      runs.back().second = end;
    else
      runs.emplace_back(i, end);
    i = end + 1;
  }
  return runs;
}

std::vector<DetectionSegment> make_detections(const VideoRecord &video,
                                              const MaskMatrix &alpha_bar,
                                              const Marginals &p_tilde,
                                              const DetectConfig &cfg) {
  const auto selected = select_clips(alpha_bar, p_tilde, cfg);
  const Matrix s_tilde = alpha_bar.cwiseProduct(p_tilde);
  std::vector<DetectionSegment> out;
  for (Eigen::Index j = 0; j < selected.cols(); ++j) {
    std::vector<bool> mask(selected.rows());
    for (Eigen::Index i = 0; i < selected.rows(); ++i) mask[i] = selected(i, j);
    for (const auto &[a, b] : merge_segments(mask, cfg)) {
      DetectionSegment seg;
      seg.video_id = video.id;
      seg.cls = static_cast<int>(j);
      seg.start_snippet = a;
      seg.end_snippet = b;
      double sum = 0.0;
      for (int i = a; i <= b; ++i) sum += s_tilde(i, j);
      seg.confidence = sum / (b - a + 1);
      out.push_back(seg);
    }
  }
  return out;
}

}  // namespace actmine
