#include "actmine/erasion.hpp"

#include <algorithm>

#include "actmine/pipeline.hpp"

namespace actmine {

std::set<int> stochastic_erase(const std::vector<double> &odds,
                               KeyedRng &rng_stream) {
  std::set<int> erased;
  for (std::size_t i = 0; i < odds.size(); ++i) {
    if (!(odds[i] >= 0.0 && odds[i] <= 1.0))
      throw ValidationError("erasing odds outside [0, 1]");
    const double eps = rng_stream.uniform();
    if (odds[i] > eps) erased.insert(static_cast<int>(i));
  }
  return erased;
}

int count_integral_segments(const std::vector<bool> &erased_mask, int l_min) {
  int count = 0;
  int run = 0;
  for (std::size_t i = 0; i <= erased_mask.size(); ++i) {
    const bool on = i < erased_mask.size() && erased_mask[i];
    if (on) {
      ++run;
    } else {
      if (run >= l_min) ++count;
      run = 0;
    }
  }
  return count;
}

double termination_metric(const std::vector<int> &counts) {
  if (counts.empty()) throw ValidationError("termination_metric: empty counts");
  if (counts.front() == 0)
    throw ZeroBaselineError("no integral erased segment at step 1");
  return static_cast<double>(counts.back()) /
         static_cast<double>(counts.front());
}

bool should_stop(const std::vector<double> &m_seq, const ErasionConfig &config) {
  const int t = static_cast<int>(m_seq.size());
  if (t < 2) throw ValidationError("should_stop needs at least two steps");
  if (t >= config.t_max) return true;
  return std::abs(m_seq[t - 1] - m_seq[t - 2]) < config.eta;
}

namespace {

struct VideoErasure {
  std::map<int, std::vector<int>> by_class;  // applied erased sets
  std::vector<bool> visibility;              // post-step state
};

VideoErasure erase_one_video(const VideoRecord &video,
                             const ScoreProvider &provider,
                             const ClassifierHandle &classifier,
                             const ErasionConfig &config, int step,
                             const std::set<int> &active_classes) {
  VideoErasure out;
  out.visibility = video.visibility;

  std::vector<int> visible_idx;
  for (int i = 0; i < video.n_snippets; ++i)
    if (video.visibility[i]) visible_idx.push_back(i);
  if (visible_idx.empty()) throw ValidationError(video.id + ": fully erased");

  // Odds from the step-start state: scores over the full video, mask pool
  // restricted to the currently visible rows.
  const Matrix phi_full = provider.score(classifier, video);
  validate_scores(phi_full);
  Matrix phi(visible_idx.size(), phi_full.cols());
  for (std::size_t r = 0; r < visible_idx.size(); ++r)
    phi.row(r) = phi_full.row(visible_idx[r]);

  const ProbabilityMatrix p = softmax_rows(phi);
  const MaskMatrix alpha = config.use_mask
                               ? soft_mask(phi, config.mask)
                               : MaskMatrix::Ones(phi.rows(), phi.cols());
  const Matrix odds = erasing_odds(alpha, p);

  for (int cls : video.labels) {
    if (!active_classes.count(cls)) continue;
    auto rng = (StreamKey() << config.seed << "erase" << video.id << cls << step)
                   .rng();
    std::vector<double> col(visible_idx.size());
    for (std::size_t r = 0; r < visible_idx.size(); ++r) col[r] = odds(r, cls);
    std::set<int> rows = stochastic_erase(col, rng);

    // map back to snippet indices, skipping rows another class already took
    std::vector<int> erase;
    for (int r : rows)
      if (out.visibility[visible_idx[r]]) erase.push_back(visible_idx[r]);

    int remaining = 0;
    for (bool v : out.visibility) remaining += v;
    if (static_cast<int>(erase.size()) == remaining && !erase.empty()) {
      // never erase a video empty: retain the lowest-odds snippet
      int keep = erase.front();
      double best = 2.0;
      for (int i : erase) {
        const double o =
            odds(std::lower_bound(visible_idx.begin(), visible_idx.end(), i) -
                     visible_idx.begin(),
                 cls);
        if (o < best) {
          best = o;
          keep = i;
        }
      }
      erase.erase(std::remove(erase.begin(), erase.end(), keep), erase.end());
    }
    for (int i : erase) out.visibility[i] = false;
    if (!erase.empty()) out.by_class[cls] = std::move(erase);
  }
  return out;
}

}  // namespace

void erase_step(std::vector<VideoRecord> &dataset, const ScoreProvider &provider,
                const ClassifierHandle &classifier, const ErasionConfig &config,
                int step, const std::set<int> &active_classes,
                StepTrace &out_trace) {
  if (dataset.empty()) throw ValidationError("erase_step: empty dataset");
  out_trace.step = step;
  std::vector<VideoErasure> results(dataset.size());
  parallel_for(static_cast<int>(dataset.size()), config.jobs, [&](int v) {
    results[v] = erase_one_video(dataset[v], provider, classifier, config, step,
                                 active_classes);
  });
  for (std::size_t v = 0; v < dataset.size(); ++v) {
    dataset[v].visibility = std::move(results[v].visibility);
    if (!results[v].by_class.empty())
      out_trace.erased[dataset[v].id] = std::move(results[v].by_class);
  }
}

MineResult mine(std::vector<VideoRecord> dataset, ScoreProvider &provider,
                const ErasionConfig &config) {
  config.validate();
  if (dataset.empty()) throw ValidationError("mine: empty dataset");
  for (const auto &rec : dataset) validate_record(rec, /*training=*/true);

  std::set<int> classes;
  for (const auto &rec : dataset)
    classes.insert(rec.labels.begin(), rec.labels.end());

  MineResult result;
  auto &trace = result.trace;
  for (const auto &rec : dataset)
    for (int cls : rec.labels)
      trace.cumulative[rec.id][cls].assign(rec.n_snippets, false);

  std::map<int, ClassTrace> per_class;
  for (int cls : classes) per_class[cls].cls = cls;
  std::set<int> active = classes;

  ClassifierHandle prev;
  for (int t = 1; t <= config.t_max; ++t) {
    ClassifierHandle handle =
        provider.retrain(t == 1 ? nullptr : &prev, dataset);
    prev = handle;
    result.handles.push_back(std::move(handle));

    StepTrace step_trace;
    erase_step(dataset, provider, result.handles.back(), config, t, active,
               step_trace);
    for (const auto &[vid, by_class] : step_trace.erased)
      for (const auto &[cls, snippets] : by_class)
        for (int i : snippets) trace.cumulative[vid][cls][i] = true;
    trace.steps.push_back(std::move(step_trace));

    for (int cls : classes) {
      auto &ct = per_class[cls];
      if (ct.stopped_at != 0) continue;
      int count = 0;
      for (const auto &rec : dataset) {
        if (!rec.labels.count(cls)) continue;
        count += count_integral_segments(trace.cumulative[rec.id][cls],
                                         config.l_min);
      }
      ct.counts.push_back(count);
      if (t == 1) {
        if (count == 0) {
          // no integral segment at the first step: the normalization of
          // Eq. 5 is undefined, the class stops right away
          ct.zero_baseline = true;
          ct.stopped_at = 1;
          ct.kept_steps = 1;
          active.erase(cls);
          continue;
        }
        ct.m.push_back(1.0);
        continue;
      }
      ct.m.push_back(termination_metric(ct.counts));
      if (should_stop(ct.m, config)) {
        ct.stopped_at = t;
        ct.stopped_by_flatness =
            std::abs(ct.m[t - 1] - ct.m[t - 2]) < config.eta;
        // a flat metric means step t found nothing new, keep t-1 models;
        // hitting the step budget keeps everything trained so far
        ct.kept_steps = ct.stopped_by_flatness ? std::max(1, t - 1) : t;
        active.erase(cls);
      }
    }
    if (active.empty()) break;
  }

  for (int cls : classes) {
    auto &ct = per_class[cls];
    if (ct.stopped_at == 0) {
      ct.stopped_at = static_cast<int>(result.handles.size());
      ct.kept_steps = ct.stopped_at;
    }
    trace.classes.push_back(std::move(ct));
  }
  result.final_dataset = std::move(dataset);
  return result;
}

}  // namespace actmine
