#include <doctest.h>

#include "actmine/detect.hpp"
#include "actmine/rng.hpp"

using namespace actmine;

namespace {

VideoRecord record_15at30(int n) {
  VideoRecord rec;
  rec.id = "v";
  rec.n_snippets = n;
  rec.frames_per_snippet = 15;
  rec.fps = 30.0;
  rec.visibility.assign(n, true);
  return rec;
}

}  // namespace

TEST_CASE("clip selection threshold is strict") {
  DetectConfig cfg;
  MaskMatrix alpha(3, 1);
  Marginals p(3, 1);
  alpha << 1.0, 0.5, 1.0;
  p << 0.6, 0.9, 0.5;
  const auto sel = select_clips(alpha, p, cfg);
  CHECK(sel(0, 0));         // 0.6 > 0.5
  CHECK_FALSE(sel(1, 0));   // 0.45
  CHECK_FALSE(sel(2, 0));   // exactly 0.5 is not selected
  CHECK_THROWS_AS(select_clips(alpha, Marginals(2, 1), cfg), ValidationError);
}

TEST_CASE("selection is monotone in the threshold") {
  auto rng = (StreamKey() << std::uint64_t{61} << "sel-mono").rng();
  MaskMatrix alpha(10, 2);
  Marginals p(10, 2);
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 2; ++j) {
      alpha(i, j) = rng.uniform();
      p(i, j) = rng.uniform();
    }
  DetectConfig lo, hi;
  lo.threshold = 0.3;
  hi.threshold = 0.6;
  const auto a = select_clips(alpha, p, lo);
  const auto b = select_clips(alpha, p, hi);
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 2; ++j)
      if (b(i, j)) CHECK(a(i, j));
}

TEST_CASE("segment merging") {
  DetectConfig cfg;
  CHECK(merge_segments({false, true, true, false, true}, cfg) ==
        std::vector<std::pair<int, int>>{{1, 2}, {4, 4}});
  CHECK(merge_segments({false, false}, cfg).empty());
  DetectConfig gap1;
  gap1.merge_gap = 1;
  CHECK(merge_segments({true, false, true}, gap1) ==
        std::vector<std::pair<int, int>>{{0, 2}});
  CHECK(merge_segments({true, false, false, true}, gap1) ==
        std::vector<std::pair<int, int>>{{0, 0}, {3, 3}});
}

TEST_CASE("detections from a uniform block") {
  auto rec = record_15at30(8);
  MaskMatrix alpha = MaskMatrix::Zero(8, 2);
  Marginals p = Marginals::Zero(8, 2);
  for (int i = 2; i <= 5; ++i) {
    alpha(i, 1) = 1.0;
    p(i, 1) = 0.8;
  }
  DetectConfig cfg;
  const auto dets = make_detections(rec, alpha, p, cfg);
  REQUIRE(dets.size() == 1);
  CHECK(dets[0].cls == 1);
  CHECK(dets[0].start_snippet == 2);
  CHECK(dets[0].end_snippet == 5);
  CHECK(dets[0].confidence == doctest::Approx(0.8));
  const auto t0 = snippet_to_seconds(dets[0].start_snippet, rec).first;
  const auto t1 = snippet_to_seconds(dets[0].end_snippet, rec).second;
  CHECK(t0 == doctest::Approx(1.0));
  CHECK(t1 == doctest::Approx(3.0));
}

TEST_CASE("no detections when nothing clears the threshold") {
  auto rec = record_15at30(6);
  const MaskMatrix alpha = MaskMatrix::Constant(6, 3, 0.6);
  const Marginals p = Marginals::Constant(6, 3, 0.5);
  CHECK(make_detections(rec, alpha, p, DetectConfig{}).empty());
}

TEST_CASE("segment confidence equals the direct mean of member scores") {
  auto rng = (StreamKey() << std::uint64_t{62} << "conf-oracle").rng();
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 6 + static_cast<int>(rng.uniform() * 20);
    auto rec = record_15at30(n);
    MaskMatrix alpha(n, 3);
    Marginals p(n, 3);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < 3; ++j) {
        alpha(i, j) = rng.uniform();
        p(i, j) = rng.uniform();
      }
    DetectConfig cfg;
    const Matrix s = alpha.cwiseProduct(p);
    const auto dets = make_detections(rec, alpha, p, cfg);
    for (const auto &d : dets) {
      double sum = 0.0;
      for (int i = d.start_snippet; i <= d.end_snippet; ++i) {
        sum += s(i, d.cls);
        CHECK(s(i, d.cls) > cfg.threshold);  // gap 0: members are selected
      }
      CHECK(d.confidence ==
            doctest::Approx(sum / (d.end_snippet - d.start_snippet + 1)));
    }
    // per class: disjoint, sorted, and covering every selected snippet
    for (int j = 0; j < 3; ++j) {
      int prev_end = -1;
      int covered = 0;
      for (const auto &d : dets) {
        if (d.cls != j) continue;
        CHECK(d.start_snippet > prev_end);
        prev_end = d.end_snippet;
        covered += d.end_snippet - d.start_snippet + 1;
      }
      int selected = 0;
      for (int i = 0; i < n; ++i) selected += s(i, j) > cfg.threshold;
      CHECK(covered == selected);
    }
  }
}
