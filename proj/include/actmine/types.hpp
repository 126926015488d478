#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace actmine {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Raw N x C classifier activations for one video. Unbounded reals.
using SnippetScoreMatrix = Matrix;
// Row-stochastic N x C matrix (each row on the simplex).
using ProbabilityMatrix = Matrix;
// N x C matrix with all entries in [0, 1].
using MaskMatrix = Matrix;

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct VideoRecord {
  std::string id;
  int n_snippets = 0;
  int frames_per_snippet = 15;
  double fps = 30.0;
  std::set<int> labels;              // 0-based class indices
  std::vector<bool> visibility;      // true = not yet erased

  int visible_count() const {
    int n = 0;
    for (bool v : visibility) n += v;
    return n;
  }
};

struct GroundTruthSegment {
  std::string video_id;
  int cls = 0;
  double start_s = 0.0;
  double end_s = 0.0;
};

struct DetectionSegment {
  std::string video_id;
  int cls = 0;
  int start_snippet = 0;
  int end_snippet = 0;   // inclusive
  double confidence = 0.0;
};

inline void validate_scores(const Matrix &phi) {
  if (phi.rows() < 1 || phi.cols() < 2)
    throw ValidationError("score matrix must be N>=1 x C>=2, got " +
                          std::to_string(phi.rows()) + "x" +
                          std::to_string(phi.cols()));
  if (!phi.allFinite())
    throw ValidationError("score matrix contains NaN or Inf");
}

inline void validate_record(const VideoRecord &rec, bool training = false) {
  if (rec.n_snippets < 1) throw ValidationError(rec.id + ": n_snippets < 1");
  if (rec.frames_per_snippet < 1)
    throw ValidationError(rec.id + ": frames_per_snippet < 1");
  if (!(rec.fps > 0.0)) throw ValidationError(rec.id + ": fps <= 0");
  if (static_cast<int>(rec.visibility.size()) != rec.n_snippets)
    throw ValidationError(rec.id + ": visibility length != n_snippets");
  if (training && rec.labels.empty())
    throw ValidationError(rec.id + ": training video has no labels");
}

// Half-open interval [t0, t1) of snippet k in seconds. Half-open makes the
// tiling of the video span exact: adjacent snippets share one endpoint.
inline std::pair<double, double> snippet_to_seconds(int k, const VideoRecord &rec) {
  if (k < 0 || k >= rec.n_snippets)
    throw std::out_of_range("snippet index " + std::to_string(k) +
                            " out of range [0, " +
                            std::to_string(rec.n_snippets) + ")");
  const double w = rec.frames_per_snippet / rec.fps;
  return {k * w, (k + 1) * w};
}

// Inverse lookup: snippet containing time t (seconds).
inline int seconds_to_snippet(double t, const VideoRecord &rec) {
  const double w = rec.frames_per_snippet / rec.fps;
  if (t < 0.0 || t >= rec.n_snippets * w)
    throw std::out_of_range("time outside video span");
  int k = static_cast<int>(t / w);
  // guard the floating division landing one cell high/low near boundaries
  while (k > 0 && t < k * w) --k;
  while (k + 1 < rec.n_snippets && t >= (k + 1) * w) ++k;
  return k;
}

inline double video_duration_s(const VideoRecord &rec) {
  return rec.n_snippets * (rec.frames_per_snippet / rec.fps);
}

}  // namespace actmine
