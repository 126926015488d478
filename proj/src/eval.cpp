#include "actmine/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace actmine {

void EvalConfig::validate() const {
  if (tiou_thresholds.empty())
    throw ValidationError("at least one tIoU threshold is required");
  double prev = 0.0;
  for (double t : tiou_thresholds) {
    if (!(t > 0.0 && t <= 1.0))
      throw ValidationError("tIoU thresholds must be in (0, 1]");
    if (t <= prev)
      throw ValidationError("tIoU thresholds must be strictly increasing");
    prev = t;
  }
}

std::vector<double> EvalConfig::average_grid() {
  std::vector<double> grid;
  for (int k = 0; k < 10; ++k) grid.push_back((10 + k) / 20.0);
  return grid;
}

double tiou(const TimeInterval &a, const TimeInterval &b) {
  if (!(a.t1 > a.t0) || !(b.t1 > b.t0))
    throw ValidationError("tiou: intervals must have positive length");
  const double inter =
      std::max(0.0, std::min(a.t1, b.t1) - std::max(a.t0, b.t0));
  const double uni = std::max(a.t1, b.t1) - std::min(a.t0, b.t0);
  return inter / uni;
}

double average_precision(
    std::vector<ScoredInterval> preds,
    const std::vector<std::pair<std::string, TimeInterval>> &gts,
    double threshold) {
  if (gts.empty()) return 0.0;
  std::stable_sort(preds.begin(), preds.end(),
                   [](const ScoredInterval &a, const ScoredInterval &b) {
                     return a.confidence > b.confidence;
                   });
  std::vector<bool> matched(gts.size(), false);
  double ap = 0.0;
  int tp = 0;
  for (std::size_t k = 0; k < preds.size(); ++k) {
    double best = 0.0;
    int best_g = -1;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (matched[g] || gts[g].first != preds[k].video_id) continue;
      const double t = tiou(preds[k].span, gts[g].second);
      if (t > best) {
        best = t;
        best_g = static_cast<int>(g);
      }
    }
    if (best_g >= 0 && best >= threshold) {
      matched[best_g] = true;
      ++tp;
      ap += static_cast<double>(tp) / static_cast<double>(k + 1);
    }
  }
  return ap / static_cast<double>(gts.size());
}

EvalResult map_at_intervals(
    const std::map<int, std::vector<ScoredInterval>> &preds_by_class,
    const std::map<int, std::vector<std::pair<std::string, TimeInterval>>> &gts_by_class,
    const EvalConfig &cfg) {
  cfg.validate();
  EvalResult result;
  result.thresholds = cfg.tiou_thresholds;

  auto map_over = [&](const std::vector<double> &grid,
                      bool record_classes) -> std::vector<double> {
    std::vector<double> maps;
    for (double thr : grid) {
      double sum = 0.0;
      int n_classes = 0;
      for (const auto &[cls, gts] : gts_by_class) {
        if (gts.empty()) continue;  // classes without ground truth are skipped
        auto it = preds_by_class.find(cls);
        const double ap = average_precision(
            it == preds_by_class.end() ? std::vector<ScoredInterval>{}
                                       : it->second,
            gts, thr);
        if (record_classes) result.per_class[cls].push_back(ap);
        sum += ap;
        ++n_classes;
      }
      maps.push_back(n_classes > 0 ? sum / n_classes : 0.0);
    }
    return maps;
  };

  result.map = map_over(cfg.tiou_thresholds, true);
  if (cfg.with_average_map) {
    const auto grid_maps = map_over(EvalConfig::average_grid(), false);
    result.average_map =
        std::accumulate(grid_maps.begin(), grid_maps.end(), 0.0) /
        grid_maps.size();
  }
  return result;
}

EvalResult map_at(const std::vector<DetectionSegment> &detections,
                  const std::map<std::string, VideoRecord> &videos,
                  const std::vector<GroundTruthSegment> &ground_truth,
                  const EvalConfig &cfg) {
  std::map<int, std::vector<ScoredInterval>> preds;
  for (const auto &d : detections) {
    auto it = videos.find(d.video_id);
    if (it == videos.end())
      throw ValidationError("detection for unknown video " + d.video_id);
    ScoredInterval si;
    si.video_id = d.video_id;
    si.span.t0 = snippet_to_seconds(d.start_snippet, it->second).first;
    si.span.t1 = snippet_to_seconds(d.end_snippet, it->second).second;
    si.confidence = d.confidence;
    preds[d.cls].push_back(si);
  }
  std::map<int, std::vector<std::pair<std::string, TimeInterval>>> gts;
  for (const auto &g : ground_truth)
    gts[g.cls].push_back({g.video_id, {g.start_s, g.end_s}});
  return map_at_intervals(preds, gts, cfg);
}

}  // namespace actmine
