#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "actmine/erasion.hpp"
#include "actmine/eval.hpp"
#include "actmine/provider.hpp"
#include "actmine/world.hpp"

namespace actmine::io {

using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

// Write-temp-then-rename so re-runs either fully replace a file or leave it.
void atomic_write(const std::filesystem::path &path, const std::string &data);
void write_json(const std::filesystem::path &path, const json &j);
json read_json(const std::filesystem::path &path);

// Every artifact carries {schema_version, kind}; loads check both.
void check_header(const json &j, const std::string &kind);

json world_config_to_json(const SyntheticWorldConfig &c);
SyntheticWorldConfig world_config_from_json(const json &j);

json world_to_json(const World &w);
World world_from_json(const json &j);

json ground_truth_to_json(const World &w);
// label -> class index resolution uses the given table
std::map<int, std::vector<std::pair<std::string, TimeInterval>>>
ground_truth_from_json(const json &j, const std::vector<std::string> &label_table);

json handles_to_json(const std::vector<ClassifierHandle> &handles,
                     const json &config_echo);
std::vector<ClassifierHandle> handles_from_json(const json &j);

json trace_to_json(const ErasionTrace &trace,
                   const std::vector<std::string> &label_table,
                   const json &config_echo);

json results_to_json(const std::vector<DetectionSegment> &detections,
                     const std::map<std::string, VideoRecord> &videos,
                     const std::vector<std::string> &label_table,
                     const json &config_echo);
std::map<int, std::vector<ScoredInterval>> results_from_json(
    const json &j, const std::vector<std::string> &label_table);

json scores_to_json(const std::vector<FileScoreProvider::VideoScores> &scores,
                    const std::vector<std::string> &label_table,
                    const std::map<std::string, VideoRecord> &videos);
struct LoadedScores {
  std::vector<FileScoreProvider::VideoScores> scores;
  std::vector<std::string> label_table;
  std::vector<VideoRecord> videos;
  int n_steps = 0;
};
LoadedScores scores_from_json(const json &j);

json metrics_to_json(const EvalResult &result,
                     const std::vector<std::string> &label_table,
                     const json &config_echo);
std::string metrics_to_csv(const EvalResult &result);

}  // namespace actmine::io
