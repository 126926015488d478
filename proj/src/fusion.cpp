#include "actmine/fusion.hpp"

#include <cmath>

namespace actmine {

MaskMatrix average_mask(const std::vector<MaskMatrix> &masks) {
  if (masks.empty()) throw ValidationError("average_mask: T must be >= 1");
  MaskMatrix sum = masks.front();
  for (std::size_t t = 1; t < masks.size(); ++t) {
    if (masks[t].rows() != sum.rows() || masks[t].cols() != sum.cols())
      throw ValidationError("average_mask: shape mismatch");
    sum += masks[t];
  }
  return sum / static_cast<double>(masks.size());
}

ProbabilityMatrix fuse_probabilities(const std::vector<ProbabilityMatrix> &ps) {
  if (ps.empty()) throw ValidationError("fuse_probabilities: T must be >= 1");
  Matrix logsum = Matrix::Zero(ps.front().rows(), ps.front().cols());
  for (const auto &p : ps) {
    if (p.rows() != logsum.rows() || p.cols() != logsum.cols())
      throw ValidationError("fuse_probabilities: shape mismatch");
    logsum += p.cwiseMax(kProbFloor).array().log().matrix();
  }
  return softmax_rows(logsum);
}

FusedOutputs collect(const VideoRecord &video,
                     const std::vector<ClassifierHandle> &handles,
                     const ScoreProvider &provider, const MaskParams &mask,
                     bool use_mask) {
  if (handles.empty()) throw ValidationError("collect: no classifiers");
  std::vector<ProbabilityMatrix> ps;
  std::vector<MaskMatrix> alphas;
  ps.reserve(handles.size());
  alphas.reserve(handles.size());
  for (const auto &h : handles) {
    const Matrix phi = provider.score(h, video);
    validate_scores(phi);
    ps.push_back(softmax_rows(phi));
    alphas.push_back(use_mask ? soft_mask(phi, mask)
                              : MaskMatrix::Ones(phi.rows(), phi.cols()));
  }
  FusedOutputs out;
  out.avg_mask = average_mask(alphas);
  out.fused_p = fuse_probabilities(ps);
  out.confidence = out.avg_mask.cwiseProduct(out.fused_p);
  return out;
}

}  // namespace actmine
