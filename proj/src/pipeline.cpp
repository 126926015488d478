#include "actmine/pipeline.hpp"

#include <mutex>
#include <thread>

#include "actmine/rng.hpp"

namespace actmine {

void parallel_for(int n, int jobs, const std::function<void(int)> &fn) {
  jobs = std::max(1, std::min(jobs, n));
  if (jobs == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> workers;
  std::exception_ptr error;
  std::mutex error_mu;
  workers.reserve(jobs);
  for (int w = 0; w < jobs; ++w) {
    workers.emplace_back([&, w] {
      try {
        for (int i = w; i < n; i += jobs) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto &t : workers) t.join();
  if (error) std::rethrow_exception(error);
}

namespace {

void inject_fusion_noise(FusedOutputs &fused, const FusionNoise &noise,
                         const std::string &video_id) {
  auto rng = (StreamKey() << noise.seed << "fusion-noise" << video_id).rng();
  const Eigen::Index c = fused.fused_p.cols();
  for (Eigen::Index i = 0; i < fused.fused_p.rows(); ++i) {
    if (rng.uniform() >= noise.rate) continue;
    fused.fused_p.row(i) = (1.0 - noise.mix) * fused.fused_p.row(i).array() +
                           noise.mix / static_cast<double>(c);
  }
  fused.confidence = fused.avg_mask.cwiseProduct(fused.fused_p);
}

}  // namespace

VideoDetections detect_video(const VideoRecord &video,
                             const std::vector<ClassifierHandle> &handles,
                             const ScoreProvider &provider,
                             const DetectParams &params) {
  VideoDetections out;
  out.fused = collect(video, handles, provider, params.mask, params.use_mask);
  if (params.fusion_noise && params.fusion_noise->rate > 0.0)
    inject_fusion_noise(out.fused, *params.fusion_noise, video.id);
  out.refined = params.use_crf ? mean_field_refine(out.fused.fused_p, params.crf)
                               : out.fused.fused_p;
  out.segments =
      make_detections(video, out.fused.avg_mask, out.refined, params.detect);
  return out;
}

std::vector<DetectionSegment> detect_dataset(
    const std::vector<VideoRecord> &videos,
    const std::vector<ClassifierHandle> &handles, const ScoreProvider &provider,
    const DetectParams &params) {
  std::vector<std::vector<DetectionSegment>> per_video(videos.size());
  parallel_for(static_cast<int>(videos.size()), params.jobs, [&](int v) {
    per_video[v] = detect_video(videos[v], handles, provider, params).segments;
  });
  std::vector<DetectionSegment> all;
  for (auto &segs : per_video)
    all.insert(all.end(), segs.begin(), segs.end());
  return all;
}

std::vector<VideoRecord> records_of(const World &world) {
  std::vector<VideoRecord> out;
  out.reserve(world.videos.size());
  for (const auto &wv : world.videos) out.push_back(wv.rec);
  return out;
}

std::map<std::string, VideoRecord> record_map(
    const std::vector<VideoRecord> &videos) {
  std::map<std::string, VideoRecord> out;
  for (const auto &rec : videos) out[rec.id] = rec;
  return out;
}

}  // namespace actmine
