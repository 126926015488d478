#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "actmine/types.hpp"

namespace actmine {

// One discriminability band. Segments drawn from a band get their per-snippet
// rank values d from [d_lo, d_hi] and their length from [len_lo, len_hi].
struct TierSpec {
  double d_lo = 0.5;
  double d_hi = 1.0;
  int len_lo = 4;
  int len_hi = 4;
};

struct SyntheticWorldConfig {
  std::uint64_t seed = 1;
  int n_videos = 50;
  int n_classes = 5;
  int snippets_lo = 24;
  int snippets_hi = 40;
  int labels_per_video = 1;
  int segments_per_class = 2;        // one per tier, cycling through tiers
  std::vector<TierSpec> tiers = {{0.75, 1.0, 5, 5}, {0.30, 0.55, 4, 4}};
  bool center_peak = true;           // d peaks at the segment center
  int n_distractors = 3;             // isolated background snippets per (video, class)
  double fps = 20.0;
  int frames_per_snippet = 5;

  // classifier response model
  double gain = 60.0;                // contrast gain a
  double off_cap_frac = 0.52;        // off-class cap as a fraction of gain
  double off_gap = 0.3;              // own-class lead of sub-cap rows (log odds)
  double residual = 0.25;            // response level of erased snippets, x gain
  double distractor_warm = 0.20;     // latent distractor level, x gain
  double distractor_hot = 0.80;      // level once the class pool is exhausted
  double noise_scale = 0.25;         // additive gaussian on every cell

  void validate() const;
};

struct GtSpan {
  int cls = 0;
  int start = 0;
  int end = 0;                       // inclusive snippet index
  std::vector<double> d;             // per-snippet rank value, d[i - start]
};

struct WorldVideo {
  VideoRecord rec;
  std::vector<GtSpan> gt;
  std::map<int, std::vector<int>> distractors;  // class -> snippet indices
};

struct World {
  SyntheticWorldConfig config;
  std::vector<std::string> label_table;
  std::vector<WorldVideo> videos;

  std::vector<GroundTruthSegment> ground_truth() const;
  const WorldVideo *find(const std::string &id) const;
};

World generate_world(const SyntheticWorldConfig &config);

}  // namespace actmine
