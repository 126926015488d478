#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "actmine/types.hpp"

namespace actmine {

struct EvalConfig {
  std::vector<double> tiou_thresholds = {0.1, 0.2, 0.3, 0.4, 0.5};
  bool with_average_map = false;  // also report the mean over [0.5:0.05:0.95]

  void validate() const;
  static std::vector<double> average_grid();  // 0.5, 0.55, ..., 0.95
};

struct TimeInterval {
  double t0 = 0.0;
  double t1 = 0.0;  // half-open [t0, t1)
};

struct ScoredInterval {
  std::string video_id;
  TimeInterval span;
  double confidence = 0.0;
};

// Temporal intersection over union of two half-open intervals.
double tiou(const TimeInterval &a, const TimeInterval &b);

// Non-interpolated AP with greedy one-to-one matching in rank order.
// Predictions are ranked by confidence descending, ties in input order.
double average_precision(std::vector<ScoredInterval> preds,
                         const std::vector<std::pair<std::string, TimeInterval>> &gts,
                         double threshold);

struct EvalResult {
  std::vector<double> thresholds;
  std::vector<double> map;                       // per threshold
  std::map<int, std::vector<double>> per_class;  // class -> per-threshold AP
  std::optional<double> average_map;
};

// mAP over classes with at least one ground-truth segment.
EvalResult map_at(const std::vector<DetectionSegment> &detections,
                  const std::map<std::string, VideoRecord> &videos,
                  const std::vector<GroundTruthSegment> &ground_truth,
                  const EvalConfig &cfg);

// Same, on second-resolution inputs (results files from disk).
EvalResult map_at_intervals(
    const std::map<int, std::vector<ScoredInterval>> &preds_by_class,
    const std::map<int, std::vector<std::pair<std::string, TimeInterval>>> &gts_by_class,
    const EvalConfig &cfg);

}  // namespace actmine
