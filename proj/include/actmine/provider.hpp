#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "actmine/types.hpp"
#include "actmine/world.hpp"

namespace actmine {

// Opaque reference to one trained classifier. The snapshot pins the training
// visibility the classifier was fitted on; score() depends on it, never on
// the visibility of the video being scored.
struct ClassifierHandle {
  int step = 0;  // 1-based erasing step
  std::map<std::string, std::vector<bool>> snapshot;
};

// retrain/score contract between the mining loop and whatever produces
// snippet scores (synthetic simulator here, score files for real networks).
class ScoreProvider {
 public:
  virtual ~ScoreProvider() = default;

  // Fit a classifier on the currently visible snippets. Sequential barrier
  // between erasing steps.
  virtual ClassifierHandle retrain(const ClassifierHandle *prev,
                                   const std::vector<VideoRecord> &dataset) = 0;

  // Finite N x C scores over the full video. Pure in (handle, video).
  virtual SnippetScoreMatrix score(const ClassifierHandle &handle,
                                   const VideoRecord &video) const = 0;

  virtual int n_classes() const = 0;
};

// Deterministic synthetic provider. Retraining is modeled as re-ranking: a
// visible ground-truth snippet scores in proportion to the percentile of its
// rank value d among the class's visible pool in the training snapshot, so
// erasing the top of the pool promotes everything below it.
class SimulatedProvider : public ScoreProvider {
 public:
  explicit SimulatedProvider(const World &world) : world_(&world) {}

  ClassifierHandle retrain(const ClassifierHandle *prev,
                           const std::vector<VideoRecord> &dataset) override;
  SnippetScoreMatrix score(const ClassifierHandle &handle,
                           const VideoRecord &video) const override;
  int n_classes() const override { return world_->config.n_classes; }

 private:
  const World *world_;
};

// Provider backed by per-step score matrices computed offline. Performs no
// retraining: each retrain() call just advances to the next stored step.
class FileScoreProvider : public ScoreProvider {
 public:
  struct VideoScores {
    std::string id;
    std::vector<Matrix> steps;  // steps[t-1] is the N x C matrix of step t
  };

  FileScoreProvider(std::vector<VideoScores> scores, int n_classes);

  ClassifierHandle retrain(const ClassifierHandle *prev,
                           const std::vector<VideoRecord> &dataset) override;
  SnippetScoreMatrix score(const ClassifierHandle &handle,
                           const VideoRecord &video) const override;
  int n_classes() const override { return n_classes_; }

  int n_steps() const { return n_steps_; }

 private:
  std::map<std::string, VideoScores> by_id_;
  int n_classes_ = 0;
  int n_steps_ = 0;
};

}  // namespace actmine
