#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "actmine/io.hpp"
#include "actmine/pipeline.hpp"

using namespace actmine;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("actmine_io_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int &counter() {
    static int c = 0;
    return c;
  }
};

SyntheticWorldConfig small_config() {
  SyntheticWorldConfig cfg;
  cfg.seed = 17;
  cfg.n_videos = 6;
  cfg.n_classes = 3;
  cfg.snippets_lo = 20;
  cfg.snippets_hi = 28;
  cfg.tiers = {{0.75, 1.0, 4, 4}, {0.3, 0.55, 3, 3}};
  cfg.n_distractors = 2;
  return cfg;
}

}  // namespace

TEST_CASE("world serialization round trip") {
  const World world = generate_world(small_config());
  const auto j = io::world_to_json(world);
  const World back = io::world_from_json(j);
  CHECK(io::world_to_json(back) == j);
  REQUIRE(back.videos.size() == world.videos.size());
  for (std::size_t v = 0; v < world.videos.size(); ++v) {
    CHECK(back.videos[v].rec.id == world.videos[v].rec.id);
    CHECK(back.videos[v].rec.labels == world.videos[v].rec.labels);
    REQUIRE(back.videos[v].gt.size() == world.videos[v].gt.size());
    for (std::size_t g = 0; g < world.videos[v].gt.size(); ++g)
      CHECK(back.videos[v].gt[g].d == world.videos[v].gt[g].d);
    CHECK(back.videos[v].distractors == world.videos[v].distractors);
  }
}

TEST_CASE("schema headers are enforced") {
  const World world = generate_world(small_config());
  auto j = io::world_to_json(world);
  j["kind"] = "something_else";
  CHECK_THROWS_AS(io::world_from_json(j), ValidationError);
  j["kind"] = "world";
  j["schema_version"] = 999;
  CHECK_THROWS_AS(io::world_from_json(j), ValidationError);
  j.erase("schema_version");
  CHECK_THROWS_AS(io::world_from_json(j), ValidationError);
}

TEST_CASE("ground truth export matches the eval schema") {
  const World world = generate_world(small_config());
  const auto j = io::ground_truth_to_json(world);
  CHECK(j.at("kind") == "ground_truth");
  const auto gts = io::ground_truth_from_json(j, world.label_table);
  std::size_t total = 0;
  for (const auto &[cls, spans] : gts) total += spans.size();
  CHECK(total == world.ground_truth().size());

  // labels missing from the table are rejected
  CHECK_THROWS_AS(io::ground_truth_from_json(j, {"other"}), ValidationError);
}

TEST_CASE("handles round trip preserves snapshots") {
  const World world = generate_world(small_config());
  SimulatedProvider provider(world);
  ErasionConfig cfg;
  cfg.mask.tau = 0.7;
  cfg.t_max = 2;
  cfg.eta = 0.0;
  const auto mined = mine(records_of(world), provider, cfg);
  const auto j = io::handles_to_json(mined.handles, io::json::object());
  const auto back = io::handles_from_json(j);
  REQUIRE(back.size() == mined.handles.size());
  for (std::size_t t = 0; t < back.size(); ++t) {
    CHECK(back[t].step == mined.handles[t].step);
    CHECK(back[t].snapshot == mined.handles[t].snapshot);
  }
}

TEST_CASE("results round trip") {
  const World world = generate_world(small_config());
  std::vector<DetectionSegment> dets;
  DetectionSegment d;
  d.video_id = world.videos[0].rec.id;
  d.cls = 1;
  d.start_snippet = 2;
  d.end_snippet = 5;
  d.confidence = 0.625;
  dets.push_back(d);

  const auto vids = record_map(records_of(world));
  const auto j = io::results_to_json(dets, vids, world.label_table,
                                     io::json::object());
  const auto preds = io::results_from_json(j, world.label_table);
  REQUIRE(preds.count(1) == 1);
  REQUIRE(preds.at(1).size() == 1);
  CHECK(preds.at(1)[0].video_id == d.video_id);
  CHECK(preds.at(1)[0].confidence == doctest::Approx(0.625));
  const auto &rec = world.videos[0].rec;
  CHECK(preds.at(1)[0].span.t0 ==
        doctest::Approx(snippet_to_seconds(2, rec).first));
  CHECK(preds.at(1)[0].span.t1 ==
        doctest::Approx(snippet_to_seconds(5, rec).second));
}

TEST_CASE("score file round trip and the file-backed provider") {
  const World world = generate_world(small_config());
  SimulatedProvider sim(world);
  auto dataset = records_of(world);
  const auto h1 = sim.retrain(nullptr, dataset);
  const auto h2 = sim.retrain(&h1, dataset);

  std::vector<FileScoreProvider::VideoScores> scores;
  for (const auto &rec : dataset) {
    FileScoreProvider::VideoScores vs;
    vs.id = rec.id;
    vs.steps = {sim.score(h1, rec), sim.score(h2, rec)};
    scores.push_back(std::move(vs));
  }
  const auto j =
      io::scores_to_json(scores, world.label_table, record_map(dataset));
  auto loaded = io::scores_from_json(j);
  CHECK(loaded.n_steps == 2);
  CHECK(loaded.label_table == world.label_table);
  REQUIRE(loaded.videos.size() == dataset.size());

  FileScoreProvider provider(std::move(loaded.scores),
                             static_cast<int>(loaded.label_table.size()));
  const auto f1 = provider.retrain(nullptr, loaded.videos);
  const Matrix a = provider.score(f1, loaded.videos[0]);
  const Matrix b = sim.score(h1, dataset[0]);
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
  const auto f2 = provider.retrain(&f1, loaded.videos);
  CHECK_THROWS_AS(provider.retrain(&f2, loaded.videos), ValidationError);
}

TEST_CASE("atomic writes leave no temp files and identical bytes") {
  TempDir dir;
  const fs::path p = dir.path / "x.json";
  io::write_json(p, io::json{{"a", 1}});
  io::write_json(p, io::json{{"a", 2}});
  CHECK(fs::exists(p));
  CHECK_FALSE(fs::exists(dir.path / "x.json.tmp"));

  const World world = generate_world(small_config());
  const fs::path w1 = dir.path / "w1.json";
  const fs::path w2 = dir.path / "w2.json";
  io::write_json(w1, io::world_to_json(world));
  io::write_json(w2, io::world_to_json(generate_world(small_config())));
  std::ifstream f1(w1), f2(w2);
  const std::string s1((std::istreambuf_iterator<char>(f1)), {});
  const std::string s2((std::istreambuf_iterator<char>(f2)), {});
  CHECK(s1 == s2);
  CHECK_FALSE(s1.empty());
}

TEST_CASE("detect pipeline is independent of the worker count") {
  const World world = generate_world(small_config());
  SimulatedProvider provider(world);
  ErasionConfig mcfg;
  mcfg.mask.tau = 0.7;
  mcfg.t_max = 2;
  mcfg.eta = 0.0;
  const auto mined = mine(records_of(world), provider, mcfg);

  DetectParams params;
  params.mask.tau = 0.7;
  params.crf.omega = 1.5;
  params.crf.sigma = 1.5;
  params.fusion_noise = FusionNoise{0.2, 0.9, 5};

  auto params4 = params;
  params4.jobs = 4;
  const auto a =
      detect_dataset(records_of(world), mined.handles, provider, params);
  const auto b =
      detect_dataset(records_of(world), mined.handles, provider, params4);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].video_id == b[i].video_id);
    CHECK(a[i].cls == b[i].cls);
    CHECK(a[i].start_snippet == b[i].start_snippet);
    CHECK(a[i].end_snippet == b[i].end_snippet);
    CHECK(a[i].confidence == b[i].confidence);  // bit identical
  }
}
