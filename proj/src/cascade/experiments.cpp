// Copyright 2026 The cascade3d Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cascade3d/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>

#include "cascade3d/geometry.hpp"

namespace cascade3d::cascade
{
namespace
{

std::string num(double v)
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

double spread(const std::vector<LossBinRow> & bins, bool after)
{
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (const LossBinRow & b : bins) {
    if (b.count == 0) {
      continue;
    }
    const double v = after ? b.loss_after : b.loss_before;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (hi == 0.0) {
    return 1.0;
  }
  return lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
}

struct Labels
{
  std::vector<int> matched;
  std::vector<double> best_iou;
  std::vector<bool> positive;
};

Labels label_against(std::span<const Box3D> boxes, std::span<const Box3D> gts, double fg_iou)
{
  Labels out;
  out.matched.assign(boxes.size(), -1);
  out.best_iou.assign(boxes.size(), 0.0);
  out.positive.assign(boxes.size(), false);
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    int best = -1;
    double best_iou = 0.0;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      const double iou = iou_3d(boxes[i], gts[g]);
      if (iou > best_iou) {
        best_iou = iou;
        best = static_cast<int>(g);
      }
    }
    out.best_iou[i] = best_iou;
    if (best >= 0 && best_iou >= fg_iou) {
      out.matched[i] = best;
      out.positive[i] = true;
    }
  }
  return out;
}

}  // namespace

double LossDistribution::spread_before() const { return spread(bins, false); }
double LossDistribution::spread_after() const { return spread(bins, true); }

std::vector<IouGainRow> experiment_iou_gain(const Refiner & refiner, const IouGainConfig & config)
{
  if (config.stages.empty()) {
    throw std::invalid_argument("at least one stage count is required");
  }
  int max_stages = 0;
  for (int t : config.stages) {
    if (t < 1) {
      throw std::invalid_argument("stage counts must be at least 1");
    }
    max_stages = std::max(max_stages, t);
  }
  const Box3D gts[1] = {config.gt};
  const Scene scene{gts, nullptr};
  std::vector<IouGainRow> rows;
  for (std::size_t k = 0; k < config.input_ious.size(); ++k) {
    const double target = config.input_ious[k];
    if (!(target > 0.0 && target <= 1.0)) {
      throw std::invalid_argument("input IoU grid values must lie in (0, 1]");
    }
    const std::vector<Box3D> proposals =
      gen_proposals_at_iou(config.gt, target, config.samples, mix_seed(config.seed, k));
    double mean_in = 0.0;
    for (const Box3D & p : proposals) {
      mean_in += iou_3d(p, config.gt);
    }
    mean_in /= static_cast<double>(std::max<std::size_t>(1, proposals.size()));

    // One cascade run to the deepest stage; shallower counts read their
    // stage from the same trace.
    const std::vector<StageTrace> traces =
      run_cascade(proposals, refiner, max_stages, scene, config.seed, config.threads);
    for (int t : config.stages) {
      double mean_out = 0.0;
      for (const StageTrace & tr : traces) {
        mean_out += iou_3d(tr.boxes[static_cast<std::size_t>(t - 1)], config.gt);
      }
      mean_out /= static_cast<double>(std::max<std::size_t>(1, traces.size()));
      rows.push_back({target, t, mean_in, mean_out});
    }
  }
  return rows;
}

std::vector<LossSample> synthetic_loss_samples(std::size_t n, std::uint64_t seed, double q_min)
{
  if (!(q_min > 0.0 && q_min < 1.0)) {
    throw std::invalid_argument("minimum completeness must lie in (0, 1)");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> q(q_min, 1.0);
  std::vector<LossSample> out(n);
  for (LossSample & s : out) {
    s.pc_score = q(rng);
    s.raw_loss = 1.0 / s.pc_score;
  }
  return out;
}

LossDistribution experiment_loss_distribution(
  std::span<const LossSample> samples, std::span<const double> bin_edges, WeightStrategy strategy)
{
  if (bin_edges.size() < 2 || bin_edges.front() != 0.0 || bin_edges.back() != 1.0) {
    throw std::invalid_argument("bin edges must run from 0 to 1");
  }
  for (std::size_t k = 1; k < bin_edges.size(); ++k) {
    if (!(bin_edges[k] > bin_edges[k - 1])) {
      throw std::invalid_argument("bin edges must be strictly increasing");
    }
  }
  std::vector<double> scores;
  scores.reserve(samples.size());
  for (const LossSample & s : samples) {
    if (!(s.pc_score >= 0.0 && s.pc_score <= 1.0)) {
      throw std::invalid_argument("completeness score outside [0, 1]");
    }
    scores.push_back(s.pc_score);
  }
  const std::vector<bool> all_positive(samples.size(), true);
  const TaskWeights w = task_weights(scores, all_positive, strategy);

  LossDistribution dist;
  const std::size_t nbins = bin_edges.size() - 1;
  dist.bins.resize(nbins);
  for (std::size_t k = 0; k < nbins; ++k) {
    dist.bins[k].lo = bin_edges[k];
    dist.bins[k].hi = bin_edges[k + 1];
  }
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double q = samples[i].pc_score;
    auto it = std::upper_bound(bin_edges.begin(), bin_edges.end(), q);
    std::size_t k = static_cast<std::size_t>(it - bin_edges.begin());
    k = std::min(nbins, std::max<std::size_t>(k, 1)) - 1;
    LossBinRow & b = dist.bins[k];
    ++b.count;
    b.weight_before += 1.0;
    b.weight_after += w.weights[i];
    b.loss_before += samples[i].raw_loss;
    b.loss_after += w.weights[i] * samples[i].raw_loss;
    dist.weight_before += 1.0;
    dist.weight_after += w.weights[i];
    dist.loss_before += samples[i].raw_loss;
    dist.loss_after += w.weights[i] * samples[i].raw_loss;
  }
  return dist;
}

TrainingStepResult simulate_training_step(
  std::span<const Box3D> proposals, std::span<const Box3D> gts,
  std::span<const CompletenessResult> gt_completeness, const Refiner & refiner,
  const TrainingStepConfig & config)
{
  if (config.stages < 1) {
    throw std::invalid_argument("training step needs at least one stage");
  }
  const auto stages = static_cast<std::size_t>(config.stages);
  if (config.stage_fg_iou.empty() ||
      (config.stage_fg_iou.size() != 1 && config.stage_fg_iou.size() != stages)) {
    throw std::invalid_argument("give one foreground IoU or one per stage");
  }
  if (gt_completeness.size() != gts.size()) {
    throw std::invalid_argument("one completeness result per ground truth is required");
  }
  const auto fg_at = [&](std::size_t s) {
    return config.stage_fg_iou.size() == 1 ? config.stage_fg_iou[0] : config.stage_fg_iou[s];
  };

  TrainingStepResult result;
  const RoiSample rois = sample_rois(proposals, gts, config.rois, fg_at(0), config.seed);
  result.sampled = rois.indices;
  std::vector<Box3D> inputs;
  inputs.reserve(rois.size());
  for (std::size_t i : rois.indices) {
    inputs.push_back(proposals[i]);
  }
  const Scene scene{gts, nullptr};
  const std::vector<StageTrace> traces = run_cascade(inputs, refiner, config.stages, scene, config.seed);

  std::vector<TaskWeights> weights;
  std::vector<StageTargets> targets;
  for (std::size_t s = 0; s < stages; ++s) {
    std::vector<Box3D> stage_in = inputs;
    if (s > 0) {
      for (std::size_t m = 0; m < traces.size(); ++m) {
        stage_in[m] = traces[m].boxes[s - 1];
      }
    }
    const Labels lab = label_against(stage_in, gts, fg_at(s));
    std::size_t positives = 0;
    StageTargets tg;
    tg.confidence.resize(stage_in.size());
    tg.regression.resize(stage_in.size());
    for (std::size_t m = 0; m < stage_in.size(); ++m) {
      tg.confidence[m] =
        iou_guided_confidence_target(lab.best_iou[m], config.confidence_lo, config.confidence_hi);
      if (lab.positive[m]) {
        ++positives;
        tg.regression[m] = gts[static_cast<std::size_t>(lab.matched[m])];
      }
    }
    result.positives_per_stage.push_back(positives);
    if (config.reweight) {
      const std::vector<double> scores =
        strategy_scores(config.strategy, stage_in, lab.matched, gts, gt_completeness);
      weights.push_back(task_weights(scores, lab.positive, config.strategy));
    } else {
      weights.push_back({std::vector<double>(stage_in.size(), 1.0), lab.positive});
    }
    targets.push_back(std::move(tg));
  }
  result.losses = stage_loss(traces, std::span<const TaskWeights>(weights), targets, config.beta);
  return result;
}

void write_config_echo(std::ostream & os, const std::string & text)
{
  os << "# " << text << '\n';
}

void write_iou_gain(std::ostream & os, std::span<const IouGainRow> rows, char delim)
{
  os << "experiment" << delim << "input_iou" << delim << "stages" << delim << "mean_input_iou"
     << delim << "mean_output_iou\n";
  for (const IouGainRow & r : rows) {
    os << "iou_gain" << delim << num(r.input_iou) << delim << r.stages << delim
       << num(r.mean_input_iou) << delim << num(r.mean_output_iou) << '\n';
  }
}

void write_loss_distribution(std::ostream & os, const LossDistribution & dist, char delim)
{
  os << "experiment" << delim << "bin_lo" << delim << "bin_hi" << delim << "count" << delim
     << "weight_before" << delim << "weight_after" << delim << "loss_before" << delim
     << "loss_after\n";
  for (const LossBinRow & b : dist.bins) {
    os << "loss_distribution" << delim << num(b.lo) << delim << num(b.hi) << delim << b.count
       << delim << num(b.weight_before) << delim << num(b.weight_after) << delim
       << num(b.loss_before) << delim << num(b.loss_after) << '\n';
  }
  os << "loss_distribution_total" << delim << num(0.0) << delim << num(1.0) << delim
     << static_cast<std::size_t>(dist.weight_before) << delim << num(dist.weight_before) << delim << num(dist.weight_after)
     << delim << num(dist.loss_before) << delim << num(dist.loss_after) << '\n';
}

}  // namespace cascade3d::cascade
