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

// Point completeness: how much of a ground-truth box the observed points
// actually span, and the proposal re-weighting built on it.

#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cascade3d/box.hpp"
#include "cascade3d/point_cloud.hpp"

namespace cascade3d
{

struct CompletenessResult
{
  /// vol(enclosing_box) / vol(gt box), in [0, 1].
  double score = 0.0;
  /// Smallest box aligned with the ground truth that encloses its points.
  Box3D enclosing_box;
  std::size_t point_count = 0;
};

/// Computes the completeness score of `gt_box` from the points of `cloud`
/// that fall inside it. Throws std::invalid_argument for a ground-truth box
/// with a zero extent.
CompletenessResult pc_score(const Box3D & gt_box, const PointCloud & cloud);

enum class SparsityLevel { Sparse, Modest, Complete };

std::string_view to_string(SparsityLevel level);

/// Sparse below 0.3, Modest in [0.3, 0.6), Complete from 0.6.
SparsityLevel sparsity_level(double score);

enum class WeightStrategy {
  /// Completeness score of the matched ground truth.
  PCScore,
  /// IoU between the proposal and its matched ground-truth box.
  IoUV1,
  /// IoU between the proposal and the points' enclosing box.
  IoUV2,
  /// Softmax over positive scores instead of linear normalization.
  Softmax,
};

std::string_view to_string(WeightStrategy strategy);
WeightStrategy parse_weight_strategy(std::string_view name);

struct TaskWeights
{
  std::vector<double> weights;
  std::vector<bool> positive_mask;
};

/// Per-proposal task weights. Positives get |P| * s_i / sum_P s_j (or the
/// softmax analogue); every other proposal gets exactly 1. When all positive
/// scores are zero the positives fall back to 1. Scores of non-positive
/// proposals are not read.
TaskWeights task_weights(
  std::span<const double> scores, const std::vector<bool> & positive_mask,
  WeightStrategy strategy = WeightStrategy::PCScore);

/// Scores that feed task_weights for one strategy. `matched_gt[i]` is the
/// ground-truth index of proposal i, or -1 for a negative.
std::vector<double> strategy_scores(
  WeightStrategy strategy, std::span<const Box3D> proposals, std::span<const int> matched_gt,
  std::span<const Box3D> gt_boxes, std::span<const CompletenessResult> gt_completeness);

struct HistogramBin
{
  double lo = 0.0;
  double hi = 0.0;
  double fraction = 0.0;
  std::size_t count = 0;
};

/// Fraction of results per score bin of width `bin_width` (which must divide
/// 1 evenly). Bins are [lo, hi) except the last, which also takes 1.0. Only
/// populated bins are returned, in ascending order.
std::vector<HistogramBin> pc_score_histogram(
  std::span<const CompletenessResult> results, double bin_width);

/// One row of the per-object score table.
struct ScoreRow
{
  std::string frame_id;
  std::size_t object_id = 0;
  std::string class_name;
  double score = 0.0;
  std::size_t point_count = 0;
};

void write_score_table(std::ostream & os, std::span<const ScoreRow> rows, char delim = ',');
void write_histogram(std::ostream & os, std::span<const HistogramBin> bins, char delim = ',');

}  // namespace cascade3d
