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

#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "cascade3d/box.hpp"
#include "cascade3d/cascade.hpp"
#include "cascade3d/completeness.hpp"

namespace cascade3d::cascade
{

/// 0.5 r^2 / beta for |r| < beta, |r| - 0.5 beta otherwise.
double smooth_l1(double residual, double beta = 1.0);

/// Binary cross-entropy of prediction p against a soft target in [0, 1];
/// p is clamped to [1e-7, 1 - 1e-7].
double binary_cross_entropy(double p, double target);

/// Linear ramp clamp((iou - lo) / (hi - lo), 0, 1).
double iou_guided_confidence_target(double iou, double lo = 0.25, double hi = 0.75);

/// Raw 7-parameter residual (prediction - target), yaw wrapped to (-pi, pi].
std::array<double, 7> box_residual(const Box3D & prediction, const Box3D & target);

/// Targets for one stage, indexed by proposal.
struct StageTargets
{
  std::vector<double> confidence;
  /// Ground-truth box for regression; only read for positive proposals.
  std::vector<std::optional<Box3D>> regression;
};

struct LossBreakdown
{
  /// [stage][proposal], all >= 0.
  std::vector<std::vector<double>> confidence_loss;
  std::vector<std::vector<double>> regression_loss;
  std::vector<std::vector<double>> weight;
  /// Per stage: sum over proposals of w * (L_con + L_reg).
  std::vector<double> stage_totals;
  double total = 0.0;
};

/// Task-weighted cascade loss. Confidence loss is BCE of each stage
/// confidence against its target; regression loss is the smooth-L1 sum over
/// the 7 residuals of the stage output, for positives only. Both are scaled
/// by the per-stage proposal weight and summed over stages.
LossBreakdown stage_loss(
  std::span<const StageTrace> traces, std::span<const TaskWeights> weights,
  std::span<const StageTargets> targets, double beta = 1.0);

/// Same weights for every stage.
LossBreakdown stage_loss(
  std::span<const StageTrace> traces, const TaskWeights & weights,
  std::span<const StageTargets> targets, double beta = 1.0);

}  // namespace cascade3d::cascade
