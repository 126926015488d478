#include "actmine/world.hpp"

#include <algorithm>
#include <cmath>

#include "actmine/rng.hpp"

namespace actmine {

void SyntheticWorldConfig::validate() const {
  if (n_videos < 1) throw ValidationError("n_videos must be >= 1");
  if (n_classes < 2) throw ValidationError("n_classes must be >= 2");
  if (snippets_lo < 1 || snippets_hi < snippets_lo)
    throw ValidationError("snippet count range is empty");
  if (labels_per_video < 1 || labels_per_video > n_classes)
    throw ValidationError("labels_per_video out of range");
  if (segments_per_class < 1)
    throw ValidationError("segments_per_class must be >= 1");
  if (tiers.empty()) throw ValidationError("at least one tier is required");
  for (const auto &t : tiers) {
    if (!(t.d_lo > 0.0 && t.d_lo <= t.d_hi && t.d_hi <= 1.0))
      throw ValidationError("tier d range must satisfy 0 < lo <= hi <= 1");
    if (t.len_lo < 1 || t.len_hi < t.len_lo)
      throw ValidationError("tier length range is empty");
  }
  if (n_distractors < 0) throw ValidationError("n_distractors must be >= 0");
  if (!(fps > 0.0)) throw ValidationError("fps must be > 0");
  if (frames_per_snippet < 1)
    throw ValidationError("frames_per_snippet must be >= 1");
  if (!(gain > 0.0)) throw ValidationError("gain must be > 0");
  if (!(off_cap_frac > 0.0 && off_cap_frac < 1.0))
    throw ValidationError("off_cap_frac must be in (0, 1)");
  if (!(residual >= 0.0 && residual < 1.0))
    throw ValidationError("residual must be in [0, 1)");
  if (noise_scale < 0.0) throw ValidationError("noise_scale must be >= 0");
}

namespace {

int rand_int(KeyedRng &rng, int lo, int hi) {  // inclusive bounds
  return lo + static_cast<int>(rng.uniform() * (hi - lo + 1));
}

// A free slot of length len with a 2-snippet margin to everything placed.
int place_span(KeyedRng &rng, std::vector<bool> &occupied, int len) {
  const int n = static_cast<int>(occupied.size());
  if (len > n) return -1;
  for (int attempt = 0; attempt < 400; ++attempt) {
    const int s = rand_int(rng, 0, n - len);
    const int lo = std::max(0, s - 2);
    const int hi = std::min(n, s + len + 2);
    bool free = true;
    for (int i = lo; i < hi; ++i) free &= !occupied[i];
    if (!free) continue;
    for (int i = s; i < s + len; ++i) occupied[i] = true;
    return s;
  }
  return -1;
}

}  // namespace

World generate_world(const SyntheticWorldConfig &config) {
  config.validate();
  World world;
  world.config = config;
  world.label_table.reserve(config.n_classes);
  for (int c = 0; c < config.n_classes; ++c)
    world.label_table.push_back("action_" + std::to_string(c));

  for (int v = 0; v < config.n_videos; ++v) {
    auto rng = (StreamKey() << config.seed << "video" << v).rng();
    WorldVideo wv;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "v%04d", v);
    wv.rec.id = buf;
    wv.rec.n_snippets = rand_int(rng, config.snippets_lo, config.snippets_hi);
    wv.rec.fps = config.fps;
    wv.rec.frames_per_snippet = config.frames_per_snippet;
    wv.rec.visibility.assign(wv.rec.n_snippets, true);

    std::vector<bool> occupied(wv.rec.n_snippets, false);
    // round-robin primary label keeps classes balanced across the world
    std::set<int> labels = {v % config.n_classes};
    while (static_cast<int>(labels.size()) < config.labels_per_video)
      labels.insert(rand_int(rng, 0, config.n_classes - 1));
    wv.rec.labels = labels;

    for (int cls : labels) {
      for (int k = 0; k < config.segments_per_class; ++k) {
        const TierSpec &tier = config.tiers[k % config.tiers.size()];
        const int len = rand_int(rng, tier.len_lo, tier.len_hi);
        const int s = place_span(rng, occupied, len);
        if (s < 0) continue;  // video too crowded, skip this segment
        GtSpan span;
        span.cls = cls;
        span.start = s;
        span.end = s + len - 1;
        span.d.resize(len);
        const double center = s + (len - 1) / 2.0;
        const double half = std::max((len - 1) / 2.0, 1e-9);
        for (int i = 0; i < len; ++i) {
          double frac;
          if (config.center_peak) {
            frac = 1.0 - std::abs(s + i - center) / (half + 1.0);
            frac += (rng.uniform() - 0.5) * 0.16;
            frac = std::clamp(frac, 0.01, 1.0);
          } else {
            frac = rng.uniform();
          }
          span.d[i] = tier.d_lo + (tier.d_hi - tier.d_lo) * frac;
        }
        wv.gt.push_back(span);
      }
      std::vector<int> spots;
      for (int k = 0; k < config.n_distractors * 40 &&
                      static_cast<int>(spots.size()) < config.n_distractors;
           ++k) {
        const int q = rand_int(rng, 0, wv.rec.n_snippets - 1);
        const int lo = std::max(0, q - 2);
        const int hi = std::min(wv.rec.n_snippets, q + 3);
        bool free = true;
        for (int i = lo; i < hi; ++i) free &= !occupied[i];
        if (!free) continue;
        occupied[q] = true;
        spots.push_back(q);
      }
      std::sort(spots.begin(), spots.end());
      wv.distractors[cls] = spots;
    }
    std::sort(wv.gt.begin(), wv.gt.end(),
              [](const GtSpan &a, const GtSpan &b) {
                return std::tie(a.cls, a.start) < std::tie(b.cls, b.start);
              });
    world.videos.push_back(std::move(wv));
  }
  return world;
}

std::vector<GroundTruthSegment> World::ground_truth() const {
  std::vector<GroundTruthSegment> out;
  for (const auto &wv : videos) {
    for (const auto &span : wv.gt) {
      GroundTruthSegment g;
      g.video_id = wv.rec.id;
      g.cls = span.cls;
      auto [t0, u0] = snippet_to_seconds(span.start, wv.rec);
      auto [u1, t1] = snippet_to_seconds(span.end, wv.rec);
      (void)u0;
      (void)u1;
      g.start_s = t0;
      g.end_s = t1;
      out.push_back(g);
    }
  }
  return out;
}

const WorldVideo *World::find(const std::string &id) const {
  for (const auto &wv : videos)
    if (wv.rec.id == id) return &wv;
  return nullptr;
}

}  // namespace actmine
