#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "actmine/crf.hpp"
#include "actmine/detect.hpp"
#include "actmine/erasion.hpp"
#include "actmine/eval.hpp"
#include "actmine/fusion.hpp"
#include "actmine/provider.hpp"
#include "actmine/world.hpp"

namespace actmine {

// Static-chunked parallel map; per-item work must be independent. Output
// slots are preassigned, so the worker count never changes results.
void parallel_for(int n, int jobs, const std::function<void(int)> &fn);

// Seeded per-snippet corruption of the fused probabilities: with rate q a
// row is mixed toward the uniform distribution with weight mix.
struct FusionNoise {
  double rate = 0.0;
  double mix = 0.9;
  std::uint64_t seed = 0;
};

struct DetectParams {
  MaskParams mask;
  bool use_mask = true;
  bool use_crf = true;
  CrfConfig crf;
  DetectConfig detect;
  std::optional<FusionNoise> fusion_noise;
  int jobs = 1;
};

struct VideoDetections {
  FusedOutputs fused;
  Marginals refined;
  std::vector<DetectionSegment> segments;
};

// collect -> (optional noise) -> CRF refine -> threshold/merge for one video.
VideoDetections detect_video(const VideoRecord &video,
                             const std::vector<ClassifierHandle> &handles,
                             const ScoreProvider &provider,
                             const DetectParams &params);

// The same over a dataset, parallel over videos, detections in video order.
std::vector<DetectionSegment> detect_dataset(
    const std::vector<VideoRecord> &videos,
    const std::vector<ClassifierHandle> &handles, const ScoreProvider &provider,
    const DetectParams &params);

std::vector<VideoRecord> records_of(const World &world);
std::map<std::string, VideoRecord> record_map(const std::vector<VideoRecord> &videos);

}  // namespace actmine
