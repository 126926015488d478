// Command-line front end: simulate | mine | detect | eval | ablate.
//
// All structured artifacts are JSON with a schema_version and a full echo of
// the resolved parameters; curves for plotting are CSV. Exit codes: 0 ok,
// 1 validation error, 2 runtime error.

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "actmine/io.hpp"
#include "actmine/pipeline.hpp"

namespace fs = std::filesystem;
using actmine::io::json;

namespace {

struct CommonParams {
  double tau = 0.5;
  double omega = 1.0;
  double sigma = 1.0;
  double threshold = 0.5;
  int t_max = 4;
  double eta = 0.05;
  int l_min = 2;
  std::uint64_t seed = 0;
  bool no_crf = false;
  bool no_mask = false;
  std::string kernel = "truncated";
  int merge_gap = 0;
  int crf_max_iters = 10;
  double crf_tol = 1e-5;
  int jobs = 1;
  double fusion_noise_rate = 0.0;
  double fusion_noise_mix = 0.9;
  std::uint64_t fusion_noise_seed = 0;

  void load(const json &j) {
    tau = j.value("tau", tau);
    omega = j.value("omega", omega);
    sigma = j.value("sigma", sigma);
    threshold = j.value("threshold", threshold);
    t_max = j.value("t_max", t_max);
    eta = j.value("eta", eta);
    l_min = j.value("l_min", l_min);
    seed = j.value("seed", seed);
    no_crf = j.value("no_crf", no_crf);
    no_mask = j.value("no_mask", no_mask);
    kernel = j.value("kernel", kernel);
    merge_gap = j.value("merge_gap", merge_gap);
    crf_max_iters = j.value("crf_max_iters", crf_max_iters);
    crf_tol = j.value("crf_tol", crf_tol);
    if (j.contains("fusion_noise")) {
      const auto &fn = j["fusion_noise"];
      fusion_noise_rate = fn.value("rate", fusion_noise_rate);
      fusion_noise_mix = fn.value("mix", fusion_noise_mix);
      fusion_noise_seed = fn.value("seed", fusion_noise_seed);
    }
  }

  json echo() const {
    json j;
    j["tau"] = tau;
    j["omega"] = omega;
    j["sigma"] = sigma;
    j["threshold"] = threshold;
    j["t_max"] = t_max;
    j["eta"] = eta;
    j["l_min"] = l_min;
    j["seed"] = seed;
    j["no_crf"] = no_crf;
    j["no_mask"] = no_mask;
    j["kernel"] = kernel;
    j["merge_gap"] = merge_gap;
    j["crf_max_iters"] = crf_max_iters;
    j["crf_tol"] = crf_tol;
    j["jobs"] = jobs;
    j["fusion_noise"] = {{"rate", fusion_noise_rate},
                         {"mix", fusion_noise_mix},
                         {"seed", fusion_noise_seed}};
    return j;
  }

  actmine::ErasionConfig erasion() const {
    actmine::ErasionConfig cfg;
    cfg.mask.tau = tau;
    cfg.t_max = t_max;
    cfg.eta = eta;
    cfg.l_min = l_min;
    cfg.seed = seed;
    cfg.use_mask = !no_mask;
    cfg.jobs = jobs;
    return cfg;
  }

  actmine::DetectParams detect() const {
    actmine::DetectParams p;
    p.mask.tau = tau;
    p.use_mask = !no_mask;
    p.use_crf = !no_crf;
    p.crf.omega = omega;
    p.crf.sigma = sigma;
    p.crf.max_iters = crf_max_iters;
    p.crf.tol = crf_tol;
    p.crf.kernel_mode = kernel == "naive" ? actmine::KernelMode::kNaive
                                          : actmine::KernelMode::kTruncated;
    p.detect.threshold = threshold;
    p.detect.merge_gap = merge_gap;
    p.jobs = jobs;
    if (fusion_noise_rate > 0.0)
      p.fusion_noise = actmine::FusionNoise{fusion_noise_rate, fusion_noise_mix,
                                            fusion_noise_seed};
    return p;
  }
};

void add_param_flags(CLI::App *cmd, CommonParams &p) {
  cmd->add_option("--tau", p.tau, "soft mask discounting threshold");
  cmd->add_option("--omega", p.omega, "CRF pairwise weight");
  cmd->add_option("--sigma", p.sigma, "CRF gaussian kernel scale");
  cmd->add_option("--threshold", p.threshold, "detection threshold");
  cmd->add_option("--t-max", p.t_max, "maximum erasing steps");
  cmd->add_option("--eta", p.eta, "termination tolerance (0 disables)");
  cmd->add_option("--l-min", p.l_min, "minimum integral segment length");
  cmd->add_option("--seed", p.seed, "RNG seed");
  cmd->add_flag("--no-crf", p.no_crf, "skip CRF refinement");
  cmd->add_flag("--no-mask", p.no_mask, "disable the soft mask everywhere");
  cmd->add_option("--kernel", p.kernel, "CRF kernel path")
      ->check(CLI::IsMember({"naive", "truncated"}));
  cmd->add_option("--merge-gap", p.merge_gap, "bridge gaps up to this length");
  cmd->add_option("--jobs", p.jobs, "parallel workers")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--fusion-noise-rate", p.fusion_noise_rate,
                  "per-snippet corruption rate for fused scores");
  cmd->add_option("--fusion-noise-mix", p.fusion_noise_mix,
                  "corruption mix toward uniform");
  cmd->add_option("--fusion-noise-seed", p.fusion_noise_seed,
                  "corruption stream seed");
}

json load_config_file(const std::string &path) {
  if (path.empty()) return json::object();
  return actmine::io::read_json(path);
}

struct HandleSource {
  std::vector<actmine::ClassifierHandle> handles;
  std::unique_ptr<actmine::ScoreProvider> provider;
  std::vector<actmine::VideoRecord> videos;
  std::vector<std::string> label_table;
  std::unique_ptr<actmine::World> world;  // kept alive for the provider
};

int run_simulate(const std::string &config_path,
                 const std::optional<std::uint64_t> &seed,
                 const std::string &out_dir) {
  actmine::SyntheticWorldConfig cfg;
  const json file = load_config_file(config_path);
  if (!file.empty()) cfg = actmine::io::world_config_from_json(file);
  if (seed) cfg.seed = *seed;
  const actmine::World world = actmine::generate_world(cfg);
  actmine::io::write_json(fs::path(out_dir) / "world.json",
                          actmine::io::world_to_json(world));
  actmine::io::write_json(fs::path(out_dir) / "ground_truth.json",
                          actmine::io::ground_truth_to_json(world));
  std::cout << "wrote " << (fs::path(out_dir) / "world.json").string() << " ("
            << world.videos.size() << " videos)\n";
  return 0;
}

int run_mine(const std::string &world_path, CommonParams &params,
             const std::string &out_dir) {
  const actmine::World world =
      actmine::io::world_from_json(actmine::io::read_json(world_path));
  actmine::SimulatedProvider provider(world);
  const auto result =
      actmine::mine(actmine::records_of(world), provider, params.erasion());
  const json echo = params.echo();
  actmine::io::write_json(
      fs::path(out_dir) / "trace.json",
      actmine::io::trace_to_json(result.trace, world.label_table, echo));
  actmine::io::write_json(fs::path(out_dir) / "handles.json",
                          actmine::io::handles_to_json(result.handles, echo));
  std::cout << "mined " << result.handles.size() << " steps over "
            << world.videos.size() << " videos\n";
  return 0;
}

HandleSource open_handles(const std::string &world_path,
                          const std::string &scores_path,
                          const std::string &handles_path) {
  HandleSource src;
  if (!world_path.empty()) {
    src.world = std::make_unique<actmine::World>(
        actmine::io::world_from_json(actmine::io::read_json(world_path)));
    src.provider = std::make_unique<actmine::SimulatedProvider>(*src.world);
    src.videos = actmine::records_of(*src.world);
    src.label_table = src.world->label_table;
    if (handles_path.empty())
      throw actmine::ValidationError("detect on a world needs --handles");
    src.handles =
        actmine::io::handles_from_json(actmine::io::read_json(handles_path));
  } else if (!scores_path.empty()) {
    auto loaded =
        actmine::io::scores_from_json(actmine::io::read_json(scores_path));
    src.videos = loaded.videos;
    src.label_table = loaded.label_table;
    const int n_steps = loaded.n_steps;
    src.provider = std::make_unique<actmine::FileScoreProvider>(
        std::move(loaded.scores), static_cast<int>(src.label_table.size()));
    if (!handles_path.empty()) {
      src.handles =
          actmine::io::handles_from_json(actmine::io::read_json(handles_path));
    } else {
      for (int t = 1; t <= n_steps; ++t) {
        actmine::ClassifierHandle h;
        h.step = t;
        src.handles.push_back(std::move(h));
      }
    }
  } else {
    throw actmine::ValidationError("need --world or --scores");
  }
  return src;
}

int run_detect(const std::string &world_path, const std::string &scores_path,
               const std::string &handles_path, CommonParams &params,
               const std::string &out_path) {
  HandleSource src = open_handles(world_path, scores_path, handles_path);
  const auto detections = actmine::detect_dataset(
      src.videos, src.handles, *src.provider, params.detect());
  actmine::io::write_json(
      out_path,
      actmine::io::results_to_json(detections, actmine::record_map(src.videos),
                                   src.label_table, params.echo()));
  std::cout << "wrote " << out_path << " (" << detections.size()
            << " segments)\n";
  return 0;
}

int run_eval(const std::string &results_path, const std::string &gt_path,
             const std::string &grid, bool average_map,
             const std::string &out_dir) {
  const json results_j = actmine::io::read_json(results_path);
  const json gt_j = actmine::io::read_json(gt_path);

  // the label universe is whatever the two files mention
  std::vector<std::string> labels;
  auto add_label = [&](const std::string &name) {
    if (std::find(labels.begin(), labels.end(), name) == labels.end())
      labels.push_back(name);
  };
  actmine::io::check_header(gt_j, "ground_truth");
  for (const auto &[vid, entry] : gt_j.at("database").items()) {
    (void)vid;
    for (const auto &ann : entry.at("annotations"))
      add_label(ann.at("label").get<std::string>());
  }
  actmine::io::check_header(results_j, "results");
  for (const auto &[vid, dets] : results_j.at("results").items()) {
    (void)vid;
    for (const auto &d : dets) add_label(d.at("label").get<std::string>());
  }
  std::sort(labels.begin(), labels.end());

  actmine::EvalConfig cfg;
  if (grid == "thumos")
    cfg.tiou_thresholds = {0.1, 0.2, 0.3, 0.4, 0.5};
  else if (grid == "activitynet")
    cfg.tiou_thresholds = {0.5, 0.75, 0.95};
  else if (!grid.empty()) {
    cfg.tiou_thresholds.clear();
    std::stringstream ss(grid);
    std::string tok;
    while (std::getline(ss, tok, ','))
      cfg.tiou_thresholds.push_back(std::stod(tok));
  }
  cfg.with_average_map = average_map;

  const auto gts = actmine::io::ground_truth_from_json(gt_j, labels);
  const auto preds = actmine::io::results_from_json(results_j, labels);
  const auto result = actmine::map_at_intervals(preds, gts, cfg);

  json echo;
  echo["results"] = results_path;
  echo["ground_truth"] = gt_path;
  echo["tiou_thresholds"] = cfg.tiou_thresholds;
  echo["average_map"] = cfg.with_average_map;
  actmine::io::write_json(fs::path(out_dir) / "metrics.json",
                          actmine::io::metrics_to_json(result, labels, echo));
  actmine::io::atomic_write(fs::path(out_dir) / "metrics.csv",
                            actmine::io::metrics_to_csv(result));
  for (std::size_t i = 0; i < result.thresholds.size(); ++i)
    std::cout << "mAP@" << result.thresholds[i] << " = " << result.map[i]
              << "\n";
  if (result.average_map)
    std::cout << "average mAP [0.5:0.05:0.95] = " << *result.average_map
              << "\n";
  return 0;
}

int run_ablate(const std::string &world_path, const std::string &spec_path,
               CommonParams &params, const std::string &out_dir) {
  const json spec = actmine::io::read_json(spec_path);
  actmine::io::check_header(spec, "ablate_spec");
  if (spec.contains("params")) params.load(spec["params"]);
  const double tiou_thr = spec.value("eval_tiou", 0.5);

  const actmine::World world =
      actmine::io::world_from_json(actmine::io::read_json(world_path));
  actmine::SimulatedProvider provider(world);
  const auto videos = actmine::records_of(world);
  const auto vid_map = actmine::record_map(videos);
  const auto gt = world.ground_truth();

  actmine::EvalConfig ecfg;
  ecfg.tiou_thresholds = {tiou_thr};

  auto map_of = [&](const std::vector<actmine::ClassifierHandle> &handles,
                    const actmine::DetectParams &dp) {
    const auto dets = actmine::detect_dataset(videos, handles, provider, dp);
    return actmine::map_at(dets, vid_map, gt, ecfg).map.front();
  };

  const std::string provenance =
      "# params=" + params.echo().dump() +
      "\n# eval_tiou=" + json(tiou_thr).dump() + "\n";
  const auto &sweeps = spec.at("sweeps");

  if (sweeps.contains("steps")) {
    const auto steps = sweeps["steps"].get<std::vector<int>>();
    const bool mask_arms = sweeps.value("mask", false);
    std::string csv = provenance + "step,mask,map\n";
    for (int arm = 0; arm < (mask_arms ? 2 : 1); ++arm) {
      const bool use_mask = arm == 0;
      auto mine_cfg = params.erasion();
      mine_cfg.use_mask = use_mask;
      mine_cfg.t_max = *std::max_element(steps.begin(), steps.end());
      actmine::SimulatedProvider p2(world);
      const auto mined = actmine::mine(videos, p2, mine_cfg);
      for (int t : steps) {
        if (t < 1 || t > static_cast<int>(mined.handles.size()))
          throw actmine::ValidationError("step sweep value out of range");
        auto dp = params.detect();
        dp.use_mask = use_mask;
        const std::vector<actmine::ClassifierHandle> prefix(
            mined.handles.begin(), mined.handles.begin() + t);
        csv += std::to_string(t);
        csv += use_mask ? ",on," : ",off,";
        csv += json(map_of(prefix, dp)).dump() + "\n";
      }
    }
    actmine::io::atomic_write(fs::path(out_dir) / "steps.csv", csv);
  }

  if (sweeps.contains("omega") || sweeps.contains("sigma")) {
    actmine::SimulatedProvider p2(world);
    const auto mined = actmine::mine(videos, p2, params.erasion());
    if (sweeps.contains("omega")) {
      std::string csv = provenance + "omega,map\n";
      for (double value : sweeps["omega"].get<std::vector<double>>()) {
        auto dp = params.detect();
        dp.use_crf = true;
        dp.crf.omega = value;
        csv += json(value).dump() + "," +
               json(map_of(mined.handles, dp)).dump() + "\n";
      }
      actmine::io::atomic_write(fs::path(out_dir) / "omega.csv", csv);
    }
    if (sweeps.contains("sigma")) {
      std::string csv = provenance + "sigma,map\n";
      for (double value : sweeps["sigma"].get<std::vector<double>>()) {
        auto dp = params.detect();
        dp.use_crf = true;
        dp.crf.sigma = value;
        csv += json(value).dump() + "," +
               json(map_of(mined.handles, dp)).dump() + "\n";
      }
      actmine::io::atomic_write(fs::path(out_dir) / "sigma.csv", csv);
    }
  }
  std::cout << "ablation curves written to " << out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"weakly supervised temporal action detection via erasure "
               "mining, classifier-series collection and FC-CRF refinement"};
  app.require_subcommand(1);

  std::string config_path, world_path, scores_path, handles_path, results_path,
      gt_path, spec_path, out_dir = ".", out_path = "results.json",
                          grid = "thumos";
  bool average_map = false;
  std::uint64_t seed_flag = 0;
  CommonParams params;

  auto *simulate = app.add_subcommand("simulate", "generate a synthetic world");
  simulate->add_option("--config", config_path, "world config JSON");
  auto *seed_opt = simulate->add_option("--seed", seed_flag, "world seed");
  simulate->add_option("--out", out_dir, "output directory")->required();

  auto *mine = app.add_subcommand("mine", "train with step-by-step erasure");
  mine->add_option("--world", world_path, "world JSON")->required();
  mine->add_option("--config", config_path, "parameter JSON");
  mine->add_option("--out", out_dir, "output directory")->required();
  add_param_flags(mine, params);

  auto *detect = app.add_subcommand("detect", "collect, refine and extract");
  detect->add_option("--world", world_path, "world JSON");
  detect->add_option("--scores", scores_path, "offline score file");
  detect->add_option("--handles", handles_path, "handles JSON from mine");
  detect->add_option("--config", config_path, "parameter JSON");
  detect->add_option("--out", out_path, "results JSON path")->required();
  add_param_flags(detect, params);

  auto *eval = app.add_subcommand("eval", "score results against ground truth");
  eval->add_option("--results", results_path, "results JSON")->required();
  eval->add_option("--ground-truth", gt_path, "ground truth JSON")->required();
  eval->add_option("--grid", grid, "thumos | activitynet | comma list");
  eval->add_flag("--average-map", average_map, "also report [0.5:0.05:0.95]");
  eval->add_option("--out", out_dir, "output directory")->required();

  auto *ablate = app.add_subcommand("ablate", "sweep steps/mask/omega/sigma");
  ablate->add_option("--world", world_path, "world JSON")->required();
  ablate->add_option("--spec", spec_path, "sweep spec JSON")->required();
  ablate->add_option("--out", out_dir, "output directory")->required();
  add_param_flags(ablate, params);

  CLI11_PARSE(app, argc, argv);

  try {
    // a --config file fills anything the command line left at its default
    if (!config_path.empty() && (mine->parsed() || detect->parsed())) {
      CommonParams from_file = params;
      json file = load_config_file(config_path);
      CommonParams defaults;
      CLI::App *active = mine->parsed() ? mine : detect;
      // flags that were typed keep their value, the rest come from the file
      CommonParams merged;
      merged.load(file);
      auto keep = [&](const char *name) {
        return active->count(name) > 0;
      };
      if (keep("--tau")) merged.tau = params.tau;
      if (keep("--omega")) merged.omega = params.omega;
      if (keep("--sigma")) merged.sigma = params.sigma;
      if (keep("--threshold")) merged.threshold = params.threshold;
      if (keep("--t-max")) merged.t_max = params.t_max;
      if (keep("--eta")) merged.eta = params.eta;
      if (keep("--l-min")) merged.l_min = params.l_min;
      if (keep("--seed")) merged.seed = params.seed;
      if (keep("--no-crf")) merged.no_crf = params.no_crf;
      if (keep("--no-mask")) merged.no_mask = params.no_mask;
      if (keep("--kernel")) merged.kernel = params.kernel;
      if (keep("--merge-gap")) merged.merge_gap = params.merge_gap;
      if (keep("--jobs")) merged.jobs = params.jobs;
      if (keep("--fusion-noise-rate"))
        merged.fusion_noise_rate = params.fusion_noise_rate;
      if (keep("--fusion-noise-mix"))
        merged.fusion_noise_mix = params.fusion_noise_mix;
      if (keep("--fusion-noise-seed"))
        merged.fusion_noise_seed = params.fusion_noise_seed;
      params = merged;
    }

    if (simulate->parsed()) {
      std::optional<std::uint64_t> sim_seed;
      if (seed_opt->count()) sim_seed = seed_flag;
      return run_simulate(config_path, sim_seed, out_dir);
    }
    if (mine->parsed()) return run_mine(world_path, params, out_dir);
    if (detect->parsed())
      return run_detect(world_path, scores_path, handles_path, params,
                        out_path);
    if (eval->parsed())
      return run_eval(results_path, gt_path, grid, average_map, out_dir);
    if (ablate->parsed())
      return run_ablate(world_path, spec_path, params, out_dir);
  } catch (const actmine::ValidationError &e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
