#include "actmine/provider.hpp"

#include <algorithm>
#include <cmath>

#include "actmine/rng.hpp"

namespace actmine {

ClassifierHandle SimulatedProvider::retrain(
    const ClassifierHandle *prev, const std::vector<VideoRecord> &dataset) {
  if (dataset.empty()) throw ValidationError("retrain: empty dataset");
  ClassifierHandle h;
  h.step = prev ? prev->step + 1 : 1;
  for (const auto &rec : dataset) h.snapshot[rec.id] = rec.visibility;
  return h;
}

SnippetScoreMatrix SimulatedProvider::score(const ClassifierHandle &handle,
                                            const VideoRecord &video) const {
  const SyntheticWorldConfig &cfg = world_->config;
  const WorldVideo *wv = world_->find(video.id);
  if (!wv) throw ValidationError("score: unknown video " + video.id);
  const int n = wv->rec.n_snippets;
  const int c_total = cfg.n_classes;
  const double a = cfg.gain;
  const double cap = cfg.off_cap_frac * a;

  Matrix phi(n, c_total);
  auto rng = (StreamKey() << cfg.seed << "score" << handle.step << video.id).rng();
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < c_total; ++c) phi(i, c) = cfg.noise_scale * rng.gauss();

  auto it = handle.snapshot.find(video.id);
  // a video the classifier never trained on counts as fully visible
  std::vector<bool> vis = it != handle.snapshot.end()
                              ? it->second
                              : std::vector<bool>(n, true);

  for (int cls : wv->rec.labels) {
    // the visible pool of this class's ground-truth snippets, ranked by d
    std::vector<std::pair<double, int>> pool;
    std::vector<std::pair<int, double>> all_gt;  // snippet -> d
    for (const auto &span : wv->gt) {
      if (span.cls != cls) continue;
      for (int i = span.start; i <= span.end; ++i) {
        const double d = span.d[i - span.start];
        all_gt.emplace_back(i, d);
        if (vis[i]) pool.emplace_back(d, i);
      }
    }
    std::sort(pool.begin(), pool.end());  // ties broken by snippet index
    std::map<int, double> percentile;
    for (std::size_t r = 0; r < pool.size(); ++r)
      percentile[pool[r].second] =
          static_cast<double>(r + 1) / static_cast<double>(pool.size());

    std::map<int, double> base;
    for (const auto &[i, d] : all_gt) {
      auto p = percentile.find(i);
      base[i] = p != percentile.end() ? a * p->second : cfg.residual * a;
    }

    // Distractors: background snippets the classifier weakly responds to.
    // Once the pool is exhausted it latches onto them one per step; already
    // erased ones keep their elevated response.
    auto dit = wv->distractors.find(cls);
    if (dit != wv->distractors.end()) {
      int hot_count = 0;
      if (pool.empty()) {
        int erased = 0;
        for (int q : dit->second) erased += !vis[q];
        hot_count = std::min<int>(erased + 1,
                                  static_cast<int>(dit->second.size()));
      }
      for (std::size_t k = 0; k < dit->second.size(); ++k) {
        const double level = static_cast<int>(k) < hot_count
                                 ? cfg.distractor_hot
                                 : cfg.distractor_warm;
        base[dit->second[k]] = level * a;
      }
    }

    for (const auto &[i, b] : base) {
      phi(i, cls) += b;
      const double off = std::min(cap, b - cfg.off_gap);
      for (int c = 0; c < c_total; ++c)
        if (c != cls) phi(i, c) += off;
    }
  }
  return phi;
}

FileScoreProvider::FileScoreProvider(std::vector<VideoScores> scores,
                                     int n_classes)
    : n_classes_(n_classes) {
  for (auto &vs : scores) {
    if (n_steps_ == 0)
      n_steps_ = static_cast<int>(vs.steps.size());
    else if (n_steps_ != static_cast<int>(vs.steps.size()))
      throw ValidationError("score file: inconsistent step counts across videos");
    by_id_[vs.id] = std::move(vs);
  }
  if (n_steps_ == 0) throw ValidationError("score file: no steps");
}

ClassifierHandle FileScoreProvider::retrain(
    const ClassifierHandle *prev, const std::vector<VideoRecord> &dataset) {
  if (dataset.empty()) throw ValidationError("retrain: empty dataset");
  ClassifierHandle h;
  h.step = prev ? prev->step + 1 : 1;
  if (h.step > n_steps_)
    throw ValidationError("score file provides only " +
                          std::to_string(n_steps_) + " steps");
  for (const auto &rec : dataset) h.snapshot[rec.id] = rec.visibility;
  return h;
}

SnippetScoreMatrix FileScoreProvider::score(const ClassifierHandle &handle,
                                            const VideoRecord &video) const {
  auto it = by_id_.find(video.id);
  if (it == by_id_.end())
    throw ValidationError("score file has no video " + video.id);
  if (handle.step < 1 || handle.step > n_steps_)
    throw ValidationError("score file has no step " +
                          std::to_string(handle.step));
  return it->second.steps[handle.step - 1];
}

}  // namespace actmine
