#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "actmine/provider.hpp"
#include "actmine/rng.hpp"
#include "actmine/scoring.hpp"
#include "actmine/types.hpp"

namespace actmine {

struct ErasionConfig {
  MaskParams mask;
  int t_max = 4;
  double eta = 0.05;     // termination tolerance on |m_j^T - m_j^(T-1)|
  int l_min = 2;         // minimum run length of an integral erased segment
  std::uint64_t seed = 0;
  bool use_mask = true;  // false: alpha == 1 everywhere (ablation arm)
  int jobs = 1;

  void validate() const {
    mask.validate();
    if (t_max < 1) throw ValidationError("t_max must be >= 1");
    if (eta < 0.0) throw ValidationError("eta must be >= 0");
    if (l_min < 1) throw ValidationError("l_min must be >= 1");
    if (jobs < 1) throw ValidationError("jobs must be >= 1");
  }
};

struct ClassTrace {
  int cls = 0;
  std::vector<int> counts;   // |M_j^t| cumulative integral erased segments
  std::vector<double> m;     // m_j^t = counts[t-1] / counts[0]
  bool zero_baseline = false;
  int stopped_at = 0;        // step at which the stop criterion fired, 0 = never
  bool stopped_by_flatness = false;
  int kept_steps = 0;        // classifiers retained for this class
};

struct StepTrace {
  int step = 0;
  // video id -> class -> snippet indices newly erased at this step
  std::map<std::string, std::map<int, std::vector<int>>> erased;
};

struct ErasionTrace {
  std::vector<StepTrace> steps;
  std::vector<ClassTrace> classes;
  // video id -> class -> cumulative erased mask
  std::map<std::string, std::map<int, std::vector<bool>>> cumulative;
};

struct MineResult {
  std::vector<ClassifierHandle> handles;
  ErasionTrace trace;
  std::vector<VideoRecord> final_dataset;  // end-state visibility
};

// Index i is erased iff odds[i] > eps_i with one uniform draw per entry.
std::set<int> stochastic_erase(const std::vector<double> &odds,
                               KeyedRng &rng_stream);

// Number of maximal runs of consecutive true values with length >= l_min.
int count_integral_segments(const std::vector<bool> &erased_mask, int l_min);

class ZeroBaselineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// m_j^T = |M_j^T| / |M_j^1| for the cumulative counts of one class.
double termination_metric(const std::vector<int> &counts);

// True once the metric is nearly flat or the step budget is exhausted.
bool should_stop(const std::vector<double> &m_seq, const ErasionConfig &config);

// One erasing step over the dataset: odds from the step-start visible rows,
// per labeled class only, stochastic removal, never erasing a video empty.
void erase_step(std::vector<VideoRecord> &dataset, const ScoreProvider &provider,
                const ClassifierHandle &classifier, const ErasionConfig &config,
                int step, const std::set<int> &active_classes,
                StepTrace &out_trace);

// Full training loop: retrain, erase, track the termination metric per class.
MineResult mine(std::vector<VideoRecord> dataset, ScoreProvider &provider,
                const ErasionConfig &config);

}  // namespace actmine
