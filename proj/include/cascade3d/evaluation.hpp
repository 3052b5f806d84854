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

// Detection matching, precision-recall curves and interpolated AP with
// KITTI difficulty or Waymo level/distance stratification.

#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cascade3d/box.hpp"
#include "cascade3d/detection.hpp"
#include "cascade3d/kitti.hpp"

namespace cascade3d::eval
{

enum class IouKind { ThreeD, Bev };
enum class RecallPositions { R11 = 11, R40 = 40 };

std::string_view to_string(IouKind kind);
std::string_view to_string(RecallPositions positions);

struct GroundTruth
{
  Box3D box;
  std::string class_name;
  kitti::Difficulty difficulty = kitti::Difficulty::Easy;
  /// Point completeness score in [0, 1].
  double pc_score = 0.0;
  std::size_t num_points = 0;
  /// Horizontal range sqrt(cx^2 + cy^2).
  double distance = 0.0;
};

GroundTruth make_ground_truth(
  const Box3D & box, std::string class_name, kitti::Difficulty difficulty, double pc_score,
  std::size_t num_points);

struct FrameEvalRecord
{
  std::string frame_id;
  std::vector<DetectionRecord> detections;
  std::vector<GroundTruth> ground_truths;
};

/// Which objects count for one evaluation. Ground truths failing `gt` are
/// ignored: they absorb matching detections without TP or FP. Unmatched
/// detections failing `det` are ignored instead of counted as FP. Empty
/// functions accept everything.
struct Filter
{
  std::function<bool(const GroundTruth &)> gt;
  std::function<bool(const DetectionRecord &)> det;
};

enum class DetStatus { TruePositive, FalsePositive, Ignored };
enum class GtStatus { Matched, Missed, Ignored };

struct FrameMatch
{
  /// Indexed like frame.detections; detections of other classes are Ignored.
  std::vector<DetStatus> detections;
  /// Ground-truth index each detection was assigned to, or -1.
  std::vector<int> assigned_gt;
  /// Indexed like frame.ground_truths; other classes are Ignored.
  std::vector<GtStatus> ground_truths;
};

double box_iou(const Box3D & a, const Box3D & b, IouKind kind);

/// Greedy matching in descending score order: each detection takes the
/// unassigned same-class ground truth of highest IoU (ties to the lower
/// index) among those with IoU >= threshold, preferring ground truths that
/// pass the filter over ignored ones.
FrameMatch match_detections(
  const FrameEvalRecord & frame, std::string_view class_name, IouKind kind, double iou_threshold,
  const Filter & filter = {});

struct PRPoint
{
  double recall = 0.0;
  double precision = 0.0;
};

struct ScoredOutcome
{
  double score = 0.0;
  bool true_positive = false;
};

struct PrCurve
{
  /// One point per distinct score threshold, in descending score order.
  std::vector<PRPoint> points;
  std::size_t num_gt = 0;
};

PrCurve precision_recall(std::span<const ScoredOutcome> outcomes, std::size_t num_gt);

/// Mean over the recall positions of the best precision at recall >= r.
/// R11 uses {0, 0.1, ..., 1}; R40 uses {1/40, ..., 1}. nullopt when the
/// curve has no ground truth.
std::optional<double> ap_interpolated(const PrCurve & curve, RecallPositions positions);

struct Stratum
{
  std::string name;
  Filter filter;
};

enum class Stratification { None, KittiDifficulty, WaymoLevels };

/// Easy, Moderate, Hard; each includes the easier classes.
std::vector<Stratum> kitti_strata();
/// LEVEL_1 (>= 5 points) and LEVEL_2 (>= 1 point), each overall and per
/// distance bin [0, 30), [30, 50), [50, inf) m.
std::vector<Stratum> waymo_strata();
std::vector<Stratum> strata_for(Stratification s);

struct EvalConfig
{
  std::string class_name = "Car";
  IouKind iou_kind = IouKind::ThreeD;
  double iou_threshold = 0.7;
  RecallPositions positions = RecallPositions::R40;
  Stratification stratification = Stratification::KittiDifficulty;
  /// Overrides `stratification` when non-empty.
  std::vector<Stratum> custom_strata;
};

struct ApRow
{
  std::string stratum;
  std::string class_name;
  std::string metric;
  std::optional<double> ap;
  std::size_t num_gt = 0;
};

/// Pools every frame's outcomes under one filter.
PrCurve pooled_curve(
  std::span<const FrameEvalRecord> frames, const EvalConfig & config, const Filter & filter);

std::vector<ApRow> evaluate(std::span<const FrameEvalRecord> frames, const EvalConfig & config);

struct BinAp
{
  double lo = 0.0;
  double hi = 0.0;
  std::optional<double> ap;
  std::size_t num_gt = 0;
};

/// AP restricted to ground truths whose completeness falls in each bin
/// [e_k, e_k+1) (the last bin is closed). `base` further restricts the
/// ground truths, e.g. to a difficulty.
std::vector<BinAp> pc_binned_ap(
  std::span<const FrameEvalRecord> frames, std::span<const double> bin_edges,
  const EvalConfig & config, const Filter & base = {});

struct ErrorBreakdown
{
  std::size_t correct = 0;
  std::size_t mislocalized = 0;
  std::size_t background = 0;
  double score_threshold = 0.0;

  std::size_t total() const { return correct + mislocalized + background; }
  double ratio(std::size_t count) const
  {
    return total() == 0 ? 0.0 : static_cast<double>(count) / static_cast<double>(total());
  }
};

/// Classifies detections with score > threshold by best 3D IoU with a
/// same-class ground truth: Correct [0.7, 1], MisLocalized [0.5, 0.7),
/// Background [0, 0.5). An empty class name takes every class.
ErrorBreakdown error_analysis(
  std::span<const FrameEvalRecord> frames, double score_threshold,
  std::string_view class_name = "");

void write_ap_table(std::ostream & os, std::span<const ApRow> rows, char delim = ',');
void write_binned_ap(
  std::ostream & os, std::span<const BinAp> bins, std::string_view metric, char delim = ',',
  bool header = true);
void write_error_breakdown(
  std::ostream & os, std::span<const ErrorBreakdown> rows, char delim = ',');
void write_pr_dump(
  std::ostream & os, std::string_view stratum, const PrCurve & curve, char delim = ',');

}  // namespace cascade3d::eval
