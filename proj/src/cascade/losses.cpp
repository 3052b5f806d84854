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

#include "cascade3d/losses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cascade3d::cascade
{

double smooth_l1(double residual, double beta)
{
  if (!(beta > 0.0)) {
    throw std::invalid_argument("smooth-L1 beta must be positive");
  }
  const double a = std::abs(residual);
  return a < beta ? 0.5 * a * a / beta : a - 0.5 * beta;
}

double binary_cross_entropy(double p, double target)
{
  if (!(target >= 0.0 && target <= 1.0)) {
    throw std::invalid_argument("confidence target outside [0, 1]");
  }
  constexpr double kEps = 1e-7;
  const double q = std::clamp(p, kEps, 1.0 - kEps);
  const double loss = -(target * std::log(q) + (1.0 - target) * std::log(1.0 - q));
  return std::max(0.0, loss);
}

double iou_guided_confidence_target(double iou, double lo, double hi)
{
  if (!(lo < hi)) {
    throw std::invalid_argument("confidence ramp needs lo < hi");
  }
  return std::clamp((iou - lo) / (hi - lo), 0.0, 1.0);
}

std::array<double, 7> box_residual(const Box3D & prediction, const Box3D & target)
{
  return {
    prediction.cx - target.cx, prediction.cy - target.cy, prediction.cz - target.cz,
    prediction.l - target.l,   prediction.w - target.w,   prediction.h - target.h,
    normalize_angle(prediction.yaw - target.yaw)};
}

LossBreakdown stage_loss(
  std::span<const StageTrace> traces, std::span<const TaskWeights> weights,
  std::span<const StageTargets> targets, double beta)
{
  const std::size_t n = traces.size();
  std::size_t stages = targets.size();
  if (weights.size() != stages) {
    throw std::invalid_argument("one weight set per stage is required");
  }
  for (const StageTrace & t : traces) {
    if (t.confidences.size() < stages || t.boxes.size() < stages) {
      throw std::invalid_argument("trace is shorter than the number of stage targets");
    }
  }
  LossBreakdown out;
  out.confidence_loss.assign(stages, std::vector<double>(n, 0.0));
  out.regression_loss.assign(stages, std::vector<double>(n, 0.0));
  out.weight.assign(stages, std::vector<double>(n, 0.0));
  out.stage_totals.assign(stages, 0.0);
  for (std::size_t s = 0; s < stages; ++s) {
    const TaskWeights & w = weights[s];
    const StageTargets & tg = targets[s];
    if (w.weights.size() != n || w.positive_mask.size() != n) {
      throw std::invalid_argument(
        "stage " + std::to_string(s + 1) + ": weight count does not match proposal count");
    }
    if (tg.confidence.size() != n || tg.regression.size() != n) {
      throw std::invalid_argument(
        "stage " + std::to_string(s + 1) + ": target count does not match proposal count");
    }
    double total = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
      const double con = binary_cross_entropy(traces[m].confidences[s], tg.confidence[m]);
      double reg = 0.0;
      if (w.positive_mask[m] && tg.regression[m]) {
        for (double r : box_residual(traces[m].boxes[s], *tg.regression[m])) {
          reg += smooth_l1(r, beta);
        }
      }
      out.confidence_loss[s][m] = con;
      out.regression_loss[s][m] = reg;
      out.weight[s][m] = w.weights[m];
      total += w.weights[m] * con + w.weights[m] * reg;
    }
    out.stage_totals[s] = total;
    out.total += total;
  }
  return out;
}

LossBreakdown stage_loss(
  std::span<const StageTrace> traces, const TaskWeights & weights,
  std::span<const StageTargets> targets, double beta)
{
  const std::vector<TaskWeights> per_stage(targets.size(), weights);
  return stage_loss(traces, std::span<const TaskWeights>(per_stage), targets, beta);
}

}  // namespace cascade3d::cascade
