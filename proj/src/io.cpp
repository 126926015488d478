#include "actmine/io.hpp"

#include <fstream>
#include <random>

namespace actmine::io {

namespace fs = std::filesystem;

void atomic_write(const fs::path &path, const std::string &data) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw std::runtime_error("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

void write_json(const fs::path &path, const json &j) {
  atomic_write(path, j.dump(2) + "\n");
}

json read_json(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error &e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  return j;
}

void check_header(const json &j, const std::string &kind) {
  if (!j.contains("schema_version") || !j["schema_version"].is_number_integer())
    throw ValidationError("missing schema_version");
  if (j["schema_version"].get<int>() != kSchemaVersion)
    throw ValidationError("unsupported schema_version");
  if (!j.contains("kind") || j["kind"].get<std::string>() != kind)
    throw ValidationError("expected kind '" + kind + "'");
}

namespace {

json header(const std::string &kind) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = kind;
  return j;
}

int label_index(const std::vector<std::string> &table, const std::string &name) {
  for (std::size_t i = 0; i < table.size(); ++i)
    if (table[i] == name) return static_cast<int>(i);
  throw ValidationError("label '" + name + "' not in label table");
}

json matrix_to_json(const Matrix &m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json &j, int cols_expected) {
  if (!j.is_array() || j.empty()) throw ValidationError("matrix must be a nonempty array");
  const int n = static_cast<int>(j.size());
  const int c = static_cast<int>(j[0].size());
  if (cols_expected > 0 && c != cols_expected)
    throw ValidationError("matrix column count mismatch");
  Matrix m(n, c);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(j[i].size()) != c)
      throw ValidationError("ragged matrix rows");
    for (int k = 0; k < c; ++k) m(i, k) = j[i][k].get<double>();
  }
  return m;
}

}  // namespace

json world_config_to_json(const SyntheticWorldConfig &c) {
  json j;
  j["seed"] = c.seed;
  j["n_videos"] = c.n_videos;
  j["n_classes"] = c.n_classes;
  j["snippets_per_video"] = {c.snippets_lo, c.snippets_hi};
  j["labels_per_video"] = c.labels_per_video;
  j["segments_per_class"] = c.segments_per_class;
  json tiers = json::array();
  for (const auto &t : c.tiers)
    tiers.push_back({{"d", {t.d_lo, t.d_hi}}, {"len", {t.len_lo, t.len_hi}}});
  j["tiers"] = std::move(tiers);
  j["center_peak"] = c.center_peak;
  j["n_distractors"] = c.n_distractors;
  j["fps"] = c.fps;
  j["frames_per_snippet"] = c.frames_per_snippet;
  j["gain"] = c.gain;
  j["off_cap_frac"] = c.off_cap_frac;
  j["off_gap"] = c.off_gap;
  j["residual"] = c.residual;
  j["distractor_warm"] = c.distractor_warm;
  j["distractor_hot"] = c.distractor_hot;
  j["noise_scale"] = c.noise_scale;
  return j;
}

SyntheticWorldConfig world_config_from_json(const json &j) {
  SyntheticWorldConfig c;
  c.seed = j.value("seed", c.seed);
  c.n_videos = j.value("n_videos", c.n_videos);
  c.n_classes = j.value("n_classes", c.n_classes);
  if (j.contains("snippets_per_video")) {
    c.snippets_lo = j["snippets_per_video"][0].get<int>();
    c.snippets_hi = j["snippets_per_video"][1].get<int>();
  }
  c.labels_per_video = j.value("labels_per_video", c.labels_per_video);
  c.segments_per_class = j.value("segments_per_class", c.segments_per_class);
  if (j.contains("tiers")) {
    c.tiers.clear();
    for (const auto &t : j["tiers"]) {
      TierSpec spec;
      spec.d_lo = t["d"][0].get<double>();
      spec.d_hi = t["d"][1].get<double>();
      spec.len_lo = t["len"][0].get<int>();
      spec.len_hi = t["len"][1].get<int>();
      c.tiers.push_back(spec);
    }
  }
  c.center_peak = j.value("center_peak", c.center_peak);
  c.n_distractors = j.value("n_distractors", c.n_distractors);
  c.fps = j.value("fps", c.fps);
  c.frames_per_snippet = j.value("frames_per_snippet", c.frames_per_snippet);
  c.gain = j.value("gain", c.gain);
  c.off_cap_frac = j.value("off_cap_frac", c.off_cap_frac);
  c.off_gap = j.value("off_gap", c.off_gap);
  c.residual = j.value("residual", c.residual);
  c.distractor_warm = j.value("distractor_warm", c.distractor_warm);
  c.distractor_hot = j.value("distractor_hot", c.distractor_hot);
  c.noise_scale = j.value("noise_scale", c.noise_scale);
  c.validate();
  return c;
}

json world_to_json(const World &w) {
  json j = header("world");
  j["config"] = world_config_to_json(w.config);
  j["label_table"] = w.label_table;
  json videos = json::array();
  for (const auto &wv : w.videos) {
    json v;
    v["id"] = wv.rec.id;
    v["n_snippets"] = wv.rec.n_snippets;
    v["fps"] = wv.rec.fps;
    v["frames_per_snippet"] = wv.rec.frames_per_snippet;
    json labels = json::array();
    for (int cls : wv.rec.labels) labels.push_back(w.label_table.at(cls));
    v["labels"] = std::move(labels);
    json gt = json::array();
    for (const auto &span : wv.gt) {
      json s;
      s["label"] = w.label_table.at(span.cls);
      s["start_snippet"] = span.start;
      s["end_snippet"] = span.end;
      s["d"] = span.d;
      gt.push_back(std::move(s));
    }
    v["gt"] = std::move(gt);
    json dis = json::array();
    for (const auto &[cls, snippets] : wv.distractors)
      dis.push_back({{"label", w.label_table.at(cls)}, {"snippets", snippets}});
    v["distractors"] = std::move(dis);
    videos.push_back(std::move(v));
  }
  j["videos"] = std::move(videos);
  return j;
}

World world_from_json(const json &j) {
  check_header(j, "world");
  World w;
  w.config = world_config_from_json(j.at("config"));
  w.label_table = j.at("label_table").get<std::vector<std::string>>();
  for (const auto &v : j.at("videos")) {
    WorldVideo wv;
    wv.rec.id = v.at("id").get<std::string>();
    wv.rec.n_snippets = v.at("n_snippets").get<int>();
    wv.rec.fps = v.at("fps").get<double>();
    wv.rec.frames_per_snippet = v.at("frames_per_snippet").get<int>();
    wv.rec.visibility.assign(wv.rec.n_snippets, true);
    for (const auto &name : v.at("labels"))
      wv.rec.labels.insert(label_index(w.label_table, name.get<std::string>()));
    for (const auto &s : v.at("gt")) {
      GtSpan span;
      span.cls = label_index(w.label_table, s.at("label").get<std::string>());
      span.start = s.at("start_snippet").get<int>();
      span.end = s.at("end_snippet").get<int>();
      span.d = s.at("d").get<std::vector<double>>();
      if (span.start < 0 || span.end < span.start ||
          span.end >= wv.rec.n_snippets)
        throw ValidationError(wv.rec.id + ": gt span out of range");
      if (static_cast<int>(span.d.size()) != span.end - span.start + 1)
        throw ValidationError(wv.rec.id + ": d length != span length");
      wv.gt.push_back(std::move(span));
    }
    for (const auto &dis : v.at("distractors")) {
      const int cls =
          label_index(w.label_table, dis.at("label").get<std::string>());
      wv.distractors[cls] = dis.at("snippets").get<std::vector<int>>();
    }
    validate_record(wv.rec);
    w.videos.push_back(std::move(wv));
  }
  return w;
}

json ground_truth_to_json(const World &w) {
  json j = header("ground_truth");
  j["version"] = "synthetic-1";
  json db;
  for (const auto &wv : w.videos) {
    json entry;
    entry["duration_s"] = video_duration_s(wv.rec);
    json anns = json::array();
    for (const auto &g : wv.gt) {
      auto t0 = snippet_to_seconds(g.start, wv.rec).first;
      auto t1 = snippet_to_seconds(g.end, wv.rec).second;
      anns.push_back({{"label", w.label_table.at(g.cls)},
                      {"segment", {t0, t1}}});
    }
    entry["annotations"] = std::move(anns);
    db[wv.rec.id] = std::move(entry);
  }
  j["database"] = std::move(db);
  return j;
}

std::map<int, std::vector<std::pair<std::string, TimeInterval>>>
ground_truth_from_json(const json &j,
                       const std::vector<std::string> &label_table) {
  check_header(j, "ground_truth");
  std::map<int, std::vector<std::pair<std::string, TimeInterval>>> out;
  for (const auto &[vid, entry] : j.at("database").items()) {
    const double duration = entry.at("duration_s").get<double>();
    for (const auto &ann : entry.at("annotations")) {
      const int cls =
          label_index(label_table, ann.at("label").get<std::string>());
      TimeInterval span;
      span.t0 = ann.at("segment")[0].get<double>();
      span.t1 = ann.at("segment")[1].get<double>();
      if (!(span.t0 >= 0.0 && span.t0 < span.t1 && span.t1 <= duration + 1e-9))
        throw ValidationError(vid + ": segment outside [0, duration]");
      out[cls].push_back({vid, span});
    }
  }
  return out;
}

json handles_to_json(const std::vector<ClassifierHandle> &handles,
                     const json &config_echo) {
  json j = header("handles");
  j["config"] = config_echo;
  json steps = json::array();
  for (const auto &h : handles) {
    json s;
    s["step"] = h.step;
    json snap;
    for (const auto &[vid, vis] : h.snapshot) {
      json bits = json::array();
      for (bool b : vis) bits.push_back(b ? 1 : 0);
      snap[vid] = std::move(bits);
    }
    s["snapshot"] = std::move(snap);
    steps.push_back(std::move(s));
  }
  j["steps"] = std::move(steps);
  return j;
}

std::vector<ClassifierHandle> handles_from_json(const json &j) {
  check_header(j, "handles");
  std::vector<ClassifierHandle> handles;
  for (const auto &s : j.at("steps")) {
    ClassifierHandle h;
    h.step = s.at("step").get<int>();
    for (const auto &[vid, bits] : s.at("snapshot").items()) {
      std::vector<bool> vis;
      vis.reserve(bits.size());
      for (const auto &b : bits) vis.push_back(b.get<int>() != 0);
      h.snapshot[vid] = std::move(vis);
    }
    handles.push_back(std::move(h));
  }
  if (handles.empty()) throw ValidationError("handles file has no steps");
  return handles;
}

json trace_to_json(const ErasionTrace &trace,
                   const std::vector<std::string> &label_table,
                   const json &config_echo) {
  json j = header("mine_trace");
  j["config"] = config_echo;
  json classes = json::array();
  for (const auto &ct : trace.classes) {
    json c;
    c["label"] = label_table.at(ct.cls);
    c["counts"] = ct.counts;
    c["m"] = ct.m;
    c["zero_baseline"] = ct.zero_baseline;
    c["stopped_at"] = ct.stopped_at;
    c["stopped_by_flatness"] = ct.stopped_by_flatness;
    c["kept_steps"] = ct.kept_steps;
    classes.push_back(std::move(c));
  }
  j["classes"] = std::move(classes);
  json steps = json::array();
  for (const auto &st : trace.steps) {
    json s;
    s["step"] = st.step;
    json erased;
    for (const auto &[vid, by_class] : st.erased) {
      json e;
      for (const auto &[cls, snippets] : by_class)
        e[label_table.at(cls)] = snippets;
      erased[vid] = std::move(e);
    }
    s["erased"] = std::move(erased);
    steps.push_back(std::move(s));
  }
  j["steps"] = std::move(steps);
  return j;
}

json results_to_json(const std::vector<DetectionSegment> &detections,
                     const std::map<std::string, VideoRecord> &videos,
                     const std::vector<std::string> &label_table,
                     const json &config_echo) {
  json j = header("results");
  j["config"] = config_echo;
  json results;
  for (const auto &[vid, rec] : videos) results[vid] = json::array();
  for (const auto &d : detections) {
    const auto &rec = videos.at(d.video_id);
    const double t0 = snippet_to_seconds(d.start_snippet, rec).first;
    const double t1 = snippet_to_seconds(d.end_snippet, rec).second;
    results[d.video_id].push_back({{"label", label_table.at(d.cls)},
                                   {"score", d.confidence},
                                   {"segment", {t0, t1}}});
  }
  j["results"] = std::move(results);
  return j;
}

std::map<int, std::vector<ScoredInterval>> results_from_json(
    const json &j, const std::vector<std::string> &label_table) {
  check_header(j, "results");
  std::map<int, std::vector<ScoredInterval>> out;
  for (const auto &[vid, dets] : j.at("results").items()) {
    for (const auto &d : dets) {
      const int cls = label_index(label_table, d.at("label").get<std::string>());
      ScoredInterval si;
      si.video_id = vid;
      si.confidence = d.at("score").get<double>();
      si.span.t0 = d.at("segment")[0].get<double>();
      si.span.t1 = d.at("segment")[1].get<double>();
      if (!(si.span.t0 >= 0.0 && si.span.t0 < si.span.t1))
        throw ValidationError(vid + ": invalid result segment");
      out[cls].push_back(std::move(si));
    }
  }
  return out;
}

json scores_to_json(const std::vector<FileScoreProvider::VideoScores> &scores,
                    const std::vector<std::string> &label_table,
                    const std::map<std::string, VideoRecord> &videos) {
  json j = header("scores");
  j["label_table"] = label_table;
  json vid_arr = json::array();
  for (const auto &vs : scores) {
    const auto &rec = videos.at(vs.id);
    json v;
    v["id"] = vs.id;
    v["fps"] = rec.fps;
    v["frames_per_snippet"] = rec.frames_per_snippet;
    v["n_snippets"] = rec.n_snippets;
    json labels = json::array();
    for (int cls : rec.labels) labels.push_back(label_table.at(cls));
    v["labels"] = std::move(labels);
    json steps = json::array();
    for (const auto &m : vs.steps) steps.push_back(matrix_to_json(m));
    v["steps"] = std::move(steps);
    vid_arr.push_back(std::move(v));
  }
  j["videos"] = std::move(vid_arr);
  return j;
}

LoadedScores scores_from_json(const json &j) {
  check_header(j, "scores");
  LoadedScores out;
  out.label_table = j.at("label_table").get<std::vector<std::string>>();
  const int c = static_cast<int>(out.label_table.size());
  for (const auto &v : j.at("videos")) {
    FileScoreProvider::VideoScores vs;
    vs.id = v.at("id").get<std::string>();
    VideoRecord rec;
    rec.id = vs.id;
    rec.fps = v.at("fps").get<double>();
    rec.frames_per_snippet = v.at("frames_per_snippet").get<int>();
    rec.n_snippets = v.at("n_snippets").get<int>();
    rec.visibility.assign(rec.n_snippets, true);
    for (const auto &name : v.at("labels"))
      rec.labels.insert(label_index(out.label_table, name.get<std::string>()));
    const auto &steps = v.at("steps");
    if (steps.empty()) throw ValidationError(vs.id + ": no steps");
    for (const auto &s : steps) {
      Matrix m = matrix_from_json(s, c);
      if (m.rows() != rec.n_snippets)
        throw ValidationError(vs.id + ": matrix rows != n_snippets");
      validate_scores(m);
      vs.steps.push_back(std::move(m));
    }
    if (out.n_steps == 0)
      out.n_steps = static_cast<int>(vs.steps.size());
    else if (out.n_steps != static_cast<int>(vs.steps.size()))
      throw ValidationError("inconsistent step counts across videos");
    validate_record(rec);
    out.videos.push_back(std::move(rec));
    out.scores.push_back(std::move(vs));
  }
  if (out.scores.empty()) throw ValidationError("scores file has no videos");
  return out;
}

json metrics_to_json(const EvalResult &result,
                     const std::vector<std::string> &label_table,
                     const json &config_echo) {
  json j = header("metrics");
  j["config"] = config_echo;
  j["tiou_thresholds"] = result.thresholds;
  j["map"] = result.map;
  json per_class;
  for (const auto &[cls, aps] : result.per_class)
    per_class[label_table.at(cls)] = aps;
  j["per_class_ap"] = std::move(per_class);
  if (result.average_map) j["average_map"] = *result.average_map;
  return j;
}

std::string metrics_to_csv(const EvalResult &result) {
  std::string csv = "tiou,map\n";
  for (std::size_t i = 0; i < result.thresholds.size(); ++i) {
    csv += json(result.thresholds[i]).dump();
    csv += ",";
    csv += json(result.map[i]).dump();
    csv += "\n";
  }
  return csv;
}

}  // namespace actmine::io
