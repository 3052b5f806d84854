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

// Simulation studies on synthetic refiners: localization gain versus stage
// count, loss balance under completeness re-weighting, and a full weighted
// training-loss pass through the cascade.

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "cascade3d/box.hpp"
#include "cascade3d/cascade.hpp"
#include "cascade3d/completeness.hpp"
#include "cascade3d/losses.hpp"
#include "cascade3d/sampling.hpp"

namespace cascade3d::cascade
{

/// A typical car: 3.9 x 1.6 x 1.56 m, 20 m ahead.
inline constexpr Box3D kReferenceCar{20.0, 3.0, -0.8, 3.9, 1.6, 1.56, 0.3};

struct IouGainConfig
{
  std::vector<double> input_ious{0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  std::vector<int> stages{1, 2, 3};
  std::size_t samples = 1000;
  std::uint64_t seed = 0;
  Box3D gt = kReferenceCar;
  unsigned threads = 1;
};

struct IouGainRow
{
  double input_iou = 0.0;
  int stages = 0;
  double mean_input_iou = 0.0;
  double mean_output_iou = 0.0;
};

/// For every input IoU, draws `samples` proposals at that IoU and reports
/// the mean output IoU after each stage count. The same proposals and
/// per-proposal seeds are used for every stage count.
std::vector<IouGainRow> experiment_iou_gain(const Refiner & refiner, const IouGainConfig & config);

struct LossSample
{
  double pc_score = 0.0;
  double raw_loss = 0.0;
};

/// `n` samples with completeness uniform in [q_min, 1] and raw loss 1 / Q.
std::vector<LossSample> synthetic_loss_samples(std::size_t n, std::uint64_t seed, double q_min = 0.05);

struct LossBinRow
{
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
  double weight_before = 0.0;
  double weight_after = 0.0;
  double loss_before = 0.0;
  double loss_after = 0.0;
};

struct LossDistribution
{
  std::vector<LossBinRow> bins;
  double weight_before = 0.0;
  double weight_after = 0.0;
  double loss_before = 0.0;
  double loss_after = 0.0;

  /// max / min of the populated bins' loss totals.
  double spread_before() const;
  double spread_after() const;
};

/// Per-bin loss and weight totals with unit weights and with re-weighting,
/// all samples treated as positives. Bins are [e_k, e_k+1), the last closed.
LossDistribution experiment_loss_distribution(
  std::span<const LossSample> samples, std::span<const double> bin_edges,
  WeightStrategy strategy = WeightStrategy::PCScore);

struct TrainingStepConfig
{
  int stages = 3;
  /// Foreground IoU per stage; a single value applies to every stage.
  std::vector<double> stage_fg_iou{0.55};
  std::size_t rois = 128;
  bool reweight = true;
  WeightStrategy strategy = WeightStrategy::PCScore;
  double beta = 1.0;
  double confidence_lo = 0.25;
  double confidence_hi = 0.75;
  std::uint64_t seed = 0;
};

struct TrainingStepResult
{
  /// Proposal indices fed to the cascade.
  std::vector<std::size_t> sampled;
  std::vector<std::size_t> positives_per_stage;
  LossBreakdown losses;
};

/// Samples RoIs from the proposals, runs them through the cascade, labels
/// each stage's inputs against that stage's foreground IoU, derives task
/// weights and targets, and returns the weighted loss.
TrainingStepResult simulate_training_step(
  std::span<const Box3D> proposals, std::span<const Box3D> gts,
  std::span<const CompletenessResult> gt_completeness, const Refiner & refiner,
  const TrainingStepConfig & config);

/// Header line recording the run configuration; starts with '#'.
void write_config_echo(std::ostream & os, const std::string & text);

void write_iou_gain(std::ostream & os, std::span<const IouGainRow> rows, char delim = ',');
void write_loss_distribution(std::ostream & os, const LossDistribution & dist, char delim = ',');

}  // namespace cascade3d::cascade
