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

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "cascade3d/completeness.hpp"
#include "cascade3d/losses.hpp"

using namespace cascade3d;
using namespace cascade3d::cascade;

namespace
{

const Box3D kGt{0.0, 0.0, 0.0, 4.0, 2.0, 1.5, 0.0};

StageTrace trace_with(const Box3D & box, double confidence, int stages = 1)
{
  StageTrace t;
  for (int s = 0; s < stages; ++s) {
    t.boxes.push_back(box);
    t.confidences.push_back(confidence);
  }
  t.fused_confidence = confidence;
  t.final_box = box;
  return t;
}

}  // namespace

TEST_CASE("smooth L1")
{
  CHECK(smooth_l1(0.0) == 0.0);
  CHECK(smooth_l1(0.5) == 0.125);
  CHECK(smooth_l1(2.0) == 1.5);
  CHECK(smooth_l1(-2.0) == 1.5);
  CHECK(smooth_l1(0.5, 0.25) == 0.375);
  CHECK(smooth_l1(0.1, 0.5) == doctest::Approx(0.01));
  CHECK_THROWS_AS(smooth_l1(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("binary cross entropy")
{
  CHECK(binary_cross_entropy(0.5, 1.0) == doctest::Approx(std::log(2.0)));
  CHECK(binary_cross_entropy(0.9, 0.9) == doctest::Approx(-(0.9 * std::log(0.9) + 0.1 * std::log(0.1))));
  CHECK(std::isfinite(binary_cross_entropy(0.0, 1.0)));
  CHECK(binary_cross_entropy(0.0, 1.0) == doctest::Approx(-std::log(1e-7)));
  CHECK(binary_cross_entropy(1.0, 1.0) >= 0.0);
  CHECK_THROWS_AS(binary_cross_entropy(0.5, 1.1), std::invalid_argument);
  CHECK_THROWS_AS(binary_cross_entropy(0.5, -0.1), std::invalid_argument);
}

TEST_CASE("confidence target ramp")
{
  CHECK(iou_guided_confidence_target(0.25) == 0.0);
  CHECK(iou_guided_confidence_target(0.75) == 1.0);
  CHECK(iou_guided_confidence_target(0.5) == 0.5);
  CHECK(iou_guided_confidence_target(0.1) == 0.0);
  CHECK(iou_guided_confidence_target(0.95) == 1.0);
  CHECK(iou_guided_confidence_target(0.6, 0.5, 0.7) == doctest::Approx(0.5));
  CHECK_THROWS_AS(iou_guided_confidence_target(0.5, 0.7, 0.7), std::invalid_argument);
}

TEST_CASE("box residual wraps yaw")
{
  Box3D p = kGt;
  p.cx = 0.5;
  p.yaw = std::numbers::pi - 0.1;
  Box3D g = kGt;
  g.yaw = -std::numbers::pi + 0.1;
  const auto r = box_residual(p, g);
  CHECK(r[0] == 0.5);
  CHECK(r[1] == 0.0);
  CHECK(std::abs(std::abs(r[6]) - 0.2) < 1e-12);
}

TEST_CASE("stage loss by hand")
{
  Box3D off = kGt;
  off.cx = 0.5;
  const std::vector<StageTrace> traces{trace_with(off, 0.5), trace_with(off, 0.5)};
  const std::vector<StageTargets> targets{{{1.0, 1.0}, {kGt, kGt}}};
  const double raw = std::log(2.0) + 0.125;

  // Scores 0.2 and 0.6 give weights 0.5 and 1.5.
  const std::vector<double> q{0.2, 0.6};
  const TaskWeights w = task_weights(q, {true, true});
  CHECK(w.weights[0] == doctest::Approx(0.5));
  CHECK(w.weights[1] == doctest::Approx(1.5));
  const LossBreakdown b = stage_loss(traces, w, targets);
  CHECK(b.confidence_loss[0][0] == doctest::Approx(std::log(2.0)));
  CHECK(b.regression_loss[0][0] == 0.125);
  CHECK(b.stage_totals[0] == doctest::Approx(2.0 * raw));
  CHECK(b.total == b.stage_totals[0]);
}

TEST_CASE("negatives contribute confidence loss only")
{
  Box3D off = kGt;
  off.cx = 1.0;
  const std::vector<StageTrace> traces{trace_with(off, 0.7), trace_with(off, 0.2), trace_with(off, 0.4)};
  const std::vector<StageTargets> targets{{{1.0, 0.0, 0.0}, {kGt, std::nullopt, kGt}}};
  const TaskWeights w{{0.0, 1.0, 1.0}, {true, false, false}};
  const LossBreakdown b = stage_loss(traces, w, targets);
  CHECK(b.regression_loss[0][2] == 0.0);
  CHECK(b.total == doctest::Approx(binary_cross_entropy(0.2, 0.0) + binary_cross_entropy(0.4, 0.0)));
}

TEST_CASE("stage loss is linear in weights and additive over stages")
{
  Box3D off = kGt;
  off.cx = 0.3;
  off.yaw = 0.2;
  std::vector<StageTrace> traces;
  std::vector<bool> mask;
  for (int i = 0; i < 6; ++i) {
    traces.push_back(trace_with(off, 0.1 + 0.1 * i, 3));
    mask.push_back(i % 2 == 0);
  }
  std::vector<StageTargets> targets(3);
  for (int s = 0; s < 3; ++s) {
    for (int i = 0; i < 6; ++i) {
      targets[static_cast<std::size_t>(s)].confidence.push_back(0.2 * s);
      targets[static_cast<std::size_t>(s)].regression.push_back(kGt);
    }
  }
  TaskWeights w{{1.0, 1.0, 0.7, 1.0, 1.3, 1.0}, mask};
  const LossBreakdown base = stage_loss(traces, w, targets);
  double sum = 0.0;
  for (double t : base.stage_totals) {
    sum += t;
  }
  CHECK(base.total == doctest::Approx(sum).epsilon(1e-14));
  for (const auto & row : base.confidence_loss) {
    for (double v : row) {
      CHECK(v >= 0.0);
    }
  }

  TaskWeights doubled = w;
  doubled.weights[4] *= 2.0;
  const LossBreakdown d = stage_loss(traces, doubled, targets);
  for (std::size_t s = 0; s < 3; ++s) {
    const double contribution =
      w.weights[4] * (base.confidence_loss[s][4] + base.regression_loss[s][4]);
    CHECK(d.stage_totals[s] - base.stage_totals[s] == doctest::Approx(contribution).epsilon(1e-12));
  }

  const std::vector<TaskWeights> too_few{w};
  CHECK_THROWS_AS(stage_loss(traces, too_few, targets), std::invalid_argument);
  TaskWeights short_w{{1.0}, {true}};
  CHECK_THROWS_AS(stage_loss(traces, short_w, targets), std::invalid_argument);
  std::vector<StageTargets> bad = targets;
  bad[1].confidence[0] = 1.5;
  CHECK_THROWS_AS(stage_loss(traces, w, bad), std::invalid_argument);
}
