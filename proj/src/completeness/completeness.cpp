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

#include "cascade3d/completeness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>

#include "cascade3d/geometry.hpp"

namespace cascade3d
{

CompletenessResult pc_score(const Box3D & gt_box, const PointCloud & cloud)
{
  if (gt_box.degenerate()) {
    throw std::invalid_argument("degenerate ground-truth box");
  }
  const std::vector<std::size_t> inside = points_in_box(gt_box, cloud);
  CompletenessResult r;
  r.point_count = inside.size();
  r.enclosing_box = smallest_enclosing_aligned_box(gt_box, cloud.select(inside));
  // The enclosure is clamped to the ground truth, so A ∩ B = A and A ∪ B = B.
  r.score = std::clamp(r.enclosing_box.volume() / gt_box.volume(), 0.0, 1.0);
  return r;
}

std::string_view to_string(SparsityLevel level)
{
  switch (level) {
    case SparsityLevel::Sparse:
      return "Sparse";
    case SparsityLevel::Modest:
      return "Modest";
    case SparsityLevel::Complete:
      return "Complete";
  }
  return "?";
}

SparsityLevel sparsity_level(double score)
{
  if (!(score >= 0.0 && score <= 1.0)) {
    throw std::invalid_argument("completeness score outside [0, 1]");
  }
  if (score < 0.3) {
    return SparsityLevel::Sparse;
  }
  if (score < 0.6) {
    return SparsityLevel::Modest;
  }
  return SparsityLevel::Complete;
}

std::string_view to_string(WeightStrategy strategy)
{
  switch (strategy) {
    case WeightStrategy::PCScore:
      return "pc-score";
    case WeightStrategy::IoUV1:
      return "iou-v1";
    case WeightStrategy::IoUV2:
      return "iou-v2";
    case WeightStrategy::Softmax:
      return "softmax";
  }
  return "?";
}

WeightStrategy parse_weight_strategy(std::string_view name)
{
  for (auto s : {WeightStrategy::PCScore, WeightStrategy::IoUV1, WeightStrategy::IoUV2,
                 WeightStrategy::Softmax}) {
    if (to_string(s) == name) {
      return s;
    }
  }
  throw std::invalid_argument("unknown weight strategy: " + std::string(name));
}

TaskWeights task_weights(
  std::span<const double> scores, const std::vector<bool> & positive_mask,
  WeightStrategy strategy)
{
  if (scores.size() != positive_mask.size()) {
    throw std::invalid_argument("scores and positive mask differ in length");
  }
  TaskWeights out;
  out.positive_mask = positive_mask;
  out.weights.assign(scores.size(), 1.0);

  std::size_t num_pos = 0;
  double max_score = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!positive_mask[i]) {
      continue;
    }
    if (!(scores[i] >= 0.0) || !std::isfinite(scores[i])) {
      throw std::invalid_argument("task weight scores must be finite and non-negative");
    }
    ++num_pos;
    max_score = std::max(max_score, scores[i]);
  }
  if (num_pos == 0) {
    return out;
  }

  // Softmax is shifted by the max for stability; it is never degenerate.
  const bool softmax = strategy == WeightStrategy::Softmax;
  auto raw = [&](double s) { return softmax ? std::exp(s - max_score) : s; };

  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (positive_mask[i]) {
      total += raw(scores[i]);
    }
  }
  if (!(total > 0.0)) {
    return out;
  }
  const double scale = static_cast<double>(num_pos) / total;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (positive_mask[i]) {
      out.weights[i] = raw(scores[i]) * scale;
    }
  }
  return out;
}

std::vector<double> strategy_scores(
  WeightStrategy strategy, std::span<const Box3D> proposals, std::span<const int> matched_gt,
  std::span<const Box3D> gt_boxes, std::span<const CompletenessResult> gt_completeness)
{
  if (proposals.size() != matched_gt.size()) {
    throw std::invalid_argument("proposals and matches differ in length");
  }
  std::vector<double> scores(proposals.size(), 0.0);
  for (std::size_t i = 0; i < proposals.size(); ++i) {
    const int g = matched_gt[i];
    if (g < 0) {
      continue;
    }
    const auto gi = static_cast<std::size_t>(g);
    if (gi >= gt_boxes.size() || gi >= gt_completeness.size()) {
      throw std::out_of_range("matched ground-truth index out of range");
    }
    switch (strategy) {
      case WeightStrategy::PCScore:
      case WeightStrategy::Softmax:
        scores[i] = gt_completeness[gi].score;
        break;
      case WeightStrategy::IoUV1:
        scores[i] = iou_3d(proposals[i], gt_boxes[gi]);
        break;
      case WeightStrategy::IoUV2:
        scores[i] = iou_3d(proposals[i], gt_completeness[gi].enclosing_box);
        break;
    }
  }
  return scores;
}

std::vector<HistogramBin> pc_score_histogram(
  std::span<const CompletenessResult> results, double bin_width)
{
  if (!(bin_width > 0.0 && bin_width <= 1.0)) {
    throw std::invalid_argument("bin width must lie in (0, 1]");
  }
  const double bins_real = 1.0 / bin_width;
  const auto num_bins = static_cast<std::size_t>(std::llround(bins_real));
  if (std::fabs(bins_real - static_cast<double>(num_bins)) > 1e-9 * bins_real) {
    throw std::invalid_argument("bin width must divide 1 evenly");
  }
  if (results.empty()) {
    return {};
  }

  std::vector<std::size_t> counts(num_bins, 0);
  for (const CompletenessResult & r : results) {
    // The epsilon keeps products like 0.15 * 20 = 2.9999... in the upper bin.
    const double pos = r.score * static_cast<double>(num_bins) + 1e-9;
    const auto idx = static_cast<std::size_t>(std::max(0.0, std::floor(pos)));
    ++counts[std::min(idx, num_bins - 1)];
  }

  std::vector<HistogramBin> out;
  const double total = static_cast<double>(results.size());
  for (std::size_t b = 0; b < num_bins; ++b) {
    if (counts[b] == 0) {
      continue;
    }
    out.push_back(
      {static_cast<double>(b) / static_cast<double>(num_bins),
       static_cast<double>(b + 1) / static_cast<double>(num_bins),
       static_cast<double>(counts[b]) / total, counts[b]});
  }
  return out;
}

void write_score_table(std::ostream & os, std::span<const ScoreRow> rows, char delim)
{
  os << "frame_id" << delim << "object_id" << delim << "class" << delim << "pc_score" << delim
     << "num_points\n";
  char buf[32];
  for (const ScoreRow & r : rows) {
    std::snprintf(buf, sizeof(buf), "%.6f", r.score);
    os << r.frame_id << delim << r.object_id << delim << r.class_name << delim << buf << delim
       << r.point_count << '\n';
  }
}

void write_histogram(std::ostream & os, std::span<const HistogramBin> bins, char delim)
{
  os << "bin_lo" << delim << "bin_hi" << delim << "count" << delim << "fraction\n";
  char buf[96];
  for (const HistogramBin & b : bins) {
    std::snprintf(
      buf, sizeof(buf), "%.4f%c%.4f%c%zu%c%.6f", b.lo, delim, b.hi, delim, b.count, delim,
      b.fraction);
    os << buf << '\n';
  }
}

}  // namespace cascade3d
