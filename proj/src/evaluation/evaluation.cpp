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

#include "cascade3d/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "cascade3d/geometry.hpp"

namespace cascade3d::eval
{
namespace
{

bool accepts(const std::function<bool(const GroundTruth &)> & f, const GroundTruth & g)
{
  return !f || f(g);
}

bool accepts(const std::function<bool(const DetectionRecord &)> & f, const DetectionRecord & d)
{
  return !f || f(d);
}

std::string format_ap(const std::optional<double> & ap)
{
  if (!ap) {
    return "no-GT";
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", 100.0 * *ap);
  return buf;
}

Filter both(const Filter & a, const Filter & b)
{
  Filter f;
  f.gt = [a, b](const GroundTruth & g) { return accepts(a.gt, g) && accepts(b.gt, g); };
  f.det = [a, b](const DetectionRecord & d) { return accepts(a.det, d) && accepts(b.det, d); };
  return f;
}

}  // namespace

std::string_view to_string(IouKind kind)
{
  return kind == IouKind::ThreeD ? "3D" : "BEV";
}

std::string_view to_string(RecallPositions positions)
{
  return positions == RecallPositions::R11 ? "AP11" : "AP40";
}

GroundTruth make_ground_truth(
  const Box3D & box, std::string class_name, kitti::Difficulty difficulty, double pc_score,
  std::size_t num_points)
{
  return {box, std::move(class_name), difficulty, pc_score, num_points, std::hypot(box.cx, box.cy)};
}

double box_iou(const Box3D & a, const Box3D & b, IouKind kind)
{
  return kind == IouKind::ThreeD ? iou_3d(a, b) : iou_bev(a, b);
}

FrameMatch match_detections(
  const FrameEvalRecord & frame, std::string_view class_name, IouKind kind, double iou_threshold,
  const Filter & filter)
{
  if (!(iou_threshold > 0.0 && iou_threshold < 1.0)) {
    throw std::invalid_argument("IoU threshold must lie in (0, 1)");
  }
  const auto & dets = frame.detections;
  const auto & gts = frame.ground_truths;
  FrameMatch m;
  m.detections.assign(dets.size(), DetStatus::Ignored);
  m.assigned_gt.assign(dets.size(), -1);
  m.ground_truths.assign(gts.size(), GtStatus::Ignored);

  std::vector<bool> care(gts.size(), false);
  std::vector<bool> relevant(gts.size(), false);
  for (std::size_t g = 0; g < gts.size(); ++g) {
    relevant[g] = gts[g].class_name == class_name;
    care[g] = relevant[g] && accepts(filter.gt, gts[g]);
    if (care[g]) {
      m.ground_truths[g] = GtStatus::Missed;
    }
  }

  std::vector<std::size_t> order;
  for (std::size_t d = 0; d < dets.size(); ++d) {
    if (dets[d].class_name == class_name) {
      order.push_back(d);
    }
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return dets[a].score > dets[b].score;
  });

  std::vector<bool> taken(gts.size(), false);
  for (std::size_t d : order) {
    int best_care = -1;
    int best_ignored = -1;
    double iou_care = -1.0;
    double iou_ignored = -1.0;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (!relevant[g] || taken[g]) {
        continue;
      }
      const double iou = box_iou(dets[d].box, gts[g].box, kind);
      if (iou < iou_threshold) {
        continue;
      }
      if (care[g] && iou > iou_care) {
        iou_care = iou;
        best_care = static_cast<int>(g);
      } else if (!care[g] && iou > iou_ignored) {
        iou_ignored = iou;
        best_ignored = static_cast<int>(g);
      }
    }
    if (best_care >= 0) {
      taken[static_cast<std::size_t>(best_care)] = true;
      m.detections[d] = DetStatus::TruePositive;
      m.assigned_gt[d] = best_care;
      m.ground_truths[static_cast<std::size_t>(best_care)] = GtStatus::Matched;
    } else if (best_ignored >= 0) {
      taken[static_cast<std::size_t>(best_ignored)] = true;
      m.assigned_gt[d] = best_ignored;
    } else if (accepts(filter.det, dets[d])) {
      m.detections[d] = DetStatus::FalsePositive;
    }
  }
  return m;
}

PrCurve precision_recall(std::span<const ScoredOutcome> outcomes, std::size_t num_gt)
{
  PrCurve curve;
  curve.num_gt = num_gt;
  if (num_gt == 0) {
    return curve;
  }
  std::vector<ScoredOutcome> sorted(outcomes.begin(), outcomes.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const ScoredOutcome & a, const ScoredOutcome & b) {
    return a.score > b.score;
  });
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    (sorted[i].true_positive ? tp : fp) += 1;
    // Detections sharing a score are accepted or rejected together.
    if (i + 1 < sorted.size() && sorted[i + 1].score == sorted[i].score) {
      continue;
    }
    curve.points.push_back(
      {static_cast<double>(tp) / static_cast<double>(num_gt),
       static_cast<double>(tp) / static_cast<double>(tp + fp)});
  }
  return curve;
}

std::optional<double> ap_interpolated(const PrCurve & curve, RecallPositions positions)
{
  if (curve.num_gt == 0) {
    return std::nullopt;
  }
  const int n = static_cast<int>(positions);
  const int first = positions == RecallPositions::R11 ? 0 : 1;
  const double denom = positions == RecallPositions::R11 ? 10.0 : 40.0;
  double sum = 0.0;
  for (int k = first; k <= static_cast<int>(denom); ++k) {
    const double r = static_cast<double>(k) / denom;
    double best = 0.0;
    for (const PRPoint & p : curve.points) {
      if (p.recall >= r - 1e-12) {
        best = std::max(best, p.precision);
      }
    }
    sum += best;
  }
  return sum / static_cast<double>(n);
}

std::vector<Stratum> kitti_strata()
{
  using kitti::Difficulty;
  auto up_to = [](Difficulty hardest) {
    return [hardest](const GroundTruth & g) {
      return g.difficulty != Difficulty::Ignored &&
             static_cast<int>(g.difficulty) <= static_cast<int>(hardest);
    };
  };
  return {
    {"Easy", {up_to(Difficulty::Easy), {}}},
    {"Moderate", {up_to(Difficulty::Moderate), {}}},
    {"Hard", {up_to(Difficulty::Hard), {}}},
  };
}

std::vector<Stratum> waymo_strata()
{
  struct Range
  {
    const char * name;
    double lo;
    double hi;
  };
  const Range ranges[] = {
    {"0-30m", 0.0, 30.0},
    {"30-50m", 30.0, 50.0},
    {"50m-inf", 50.0, std::numeric_limits<double>::infinity()}};
  std::vector<Stratum> out;
  for (const auto & [level, min_points] :
       {std::pair<const char *, std::size_t>{"LEVEL_1", 5}, {"LEVEL_2", 1}}) {
    const std::size_t mp = min_points;
    out.push_back({level, {[mp](const GroundTruth & g) { return g.num_points >= mp; }, {}}});
    for (const Range & r : ranges) {
      const double lo = r.lo;
      const double hi = r.hi;
      Filter f;
      f.gt = [mp, lo, hi](const GroundTruth & g) {
        return g.num_points >= mp && g.distance >= lo && g.distance < hi;
      };
      f.det = [lo, hi](const DetectionRecord & d) {
        const double dist = std::hypot(d.box.cx, d.box.cy);
        return dist >= lo && dist < hi;
      };
      out.push_back({std::string(level) + "/" + r.name, std::move(f)});
    }
  }
  return out;
}

std::vector<Stratum> strata_for(Stratification s)
{
  switch (s) {
    case Stratification::None:
      return {{"all", {}}};
    case Stratification::KittiDifficulty:
      return kitti_strata();
    case Stratification::WaymoLevels:
      return waymo_strata();
  }
  return {};
}

PrCurve pooled_curve(
  std::span<const FrameEvalRecord> frames, const EvalConfig & config, const Filter & filter)
{
  std::vector<ScoredOutcome> outcomes;
  std::size_t num_gt = 0;
  for (const FrameEvalRecord & frame : frames) {
    const FrameMatch m =
      match_detections(frame, config.class_name, config.iou_kind, config.iou_threshold, filter);
    for (std::size_t d = 0; d < m.detections.size(); ++d) {
      if (m.detections[d] != DetStatus::Ignored) {
        outcomes.push_back(
          {frame.detections[d].score, m.detections[d] == DetStatus::TruePositive});
      }
    }
    num_gt += static_cast<std::size_t>(
      std::count_if(m.ground_truths.begin(), m.ground_truths.end(), [](GtStatus s) {
        return s != GtStatus::Ignored;
      }));
  }
  return precision_recall(outcomes, num_gt);
}

std::vector<ApRow> evaluate(std::span<const FrameEvalRecord> frames, const EvalConfig & config)
{
  const std::vector<Stratum> strata =
    config.custom_strata.empty() ? strata_for(config.stratification) : config.custom_strata;
  const std::string metric =
    std::string(to_string(config.positions)) + "_" + std::string(to_string(config.iou_kind));
  std::vector<ApRow> rows;
  for (const Stratum & s : strata) {
    const PrCurve curve = pooled_curve(frames, config, s.filter);
    rows.push_back(
      {s.name, config.class_name, metric, ap_interpolated(curve, config.positions), curve.num_gt});
  }
  return rows;
}

std::vector<BinAp> pc_binned_ap(
  std::span<const FrameEvalRecord> frames, std::span<const double> bin_edges,
  const EvalConfig & config, const Filter & base)
{
  if (bin_edges.size() < 2) {
    throw std::invalid_argument("need at least two bin edges");
  }
  for (std::size_t i = 0; i < bin_edges.size(); ++i) {
    if (bin_edges[i] < 0.0 || bin_edges[i] > 1.0 || (i > 0 && !(bin_edges[i] > bin_edges[i - 1]))) {
      throw std::invalid_argument("bin edges must be ascending within [0, 1]");
    }
  }
  std::vector<BinAp> out;
  const std::size_t last = bin_edges.size() - 2;
  for (std::size_t b = 0; b + 1 < bin_edges.size(); ++b) {
    const double lo = bin_edges[b];
    const double hi = bin_edges[b + 1];
    const bool closed = b == last;
    Filter bin;
    bin.gt = [lo, hi, closed](const GroundTruth & g) {
      return g.pc_score >= lo && (g.pc_score < hi || (closed && g.pc_score <= hi));
    };
    const PrCurve curve = pooled_curve(frames, config, both(base, bin));
    out.push_back({lo, hi, ap_interpolated(curve, config.positions), curve.num_gt});
  }
  return out;
}

ErrorBreakdown error_analysis(
  std::span<const FrameEvalRecord> frames, double score_threshold, std::string_view class_name)
{
  if (!(score_threshold >= 0.0 && score_threshold <= 1.0)) {
    throw std::invalid_argument("score threshold must lie in [0, 1]");
  }
  ErrorBreakdown e;
  e.score_threshold = score_threshold;
  for (const FrameEvalRecord & frame : frames) {
    for (const DetectionRecord & d : frame.detections) {
      if (!(d.score > score_threshold)) {
        continue;
      }
      if (!class_name.empty() && d.class_name != class_name) {
        continue;
      }
      double best = 0.0;
      for (const GroundTruth & g : frame.ground_truths) {
        if (g.class_name == d.class_name) {
          best = std::max(best, iou_3d(d.box, g.box));
        }
      }
      if (best >= 0.7) {
        ++e.correct;
      } else if (best >= 0.5) {
        ++e.mislocalized;
      } else {
        ++e.background;
      }
    }
  }
  return e;
}

void write_ap_table(std::ostream & os, std::span<const ApRow> rows, char delim)
{
  os << "stratum" << delim << "class" << delim << "metric" << delim << "AP_percent" << delim
     << "num_gt\n";
  for (const ApRow & r : rows) {
    os << r.stratum << delim << r.class_name << delim << r.metric << delim << format_ap(r.ap)
       << delim << r.num_gt << '\n';
  }
}

void write_binned_ap(
  std::ostream & os, std::span<const BinAp> bins, std::string_view metric, char delim,
  bool header)
{
  if (header) {
    os << "bin_lo" << delim << "bin_hi" << delim << "metric" << delim << "AP_percent" << delim
       << "num_gt\n";
  }
  char buf[64];
  for (const BinAp & b : bins) {
    std::snprintf(buf, sizeof(buf), "%.4f%c%.4f", b.lo, delim, b.hi);
    os << buf << delim << metric << delim << format_ap(b.ap) << delim << b.num_gt << '\n';
  }
}

void write_error_breakdown(std::ostream & os, std::span<const ErrorBreakdown> rows, char delim)
{
  os << "score_threshold" << delim << "correct" << delim << "mislocalized" << delim
     << "background" << delim << "correct_ratio" << delim << "mislocalized_ratio" << delim
     << "background_ratio\n";
  char buf[160];
  for (const ErrorBreakdown & e : rows) {
    std::snprintf(
      buf, sizeof(buf), "%.3f%c%zu%c%zu%c%zu%c%.6f%c%.6f%c%.6f", e.score_threshold, delim,
      e.correct, delim, e.mislocalized, delim, e.background, delim, e.ratio(e.correct), delim,
      e.ratio(e.mislocalized), delim, e.ratio(e.background));
    os << buf << '\n';
  }
}

void write_pr_dump(std::ostream & os, std::string_view stratum, const PrCurve & curve, char delim)
{
  char buf[64];
  for (const PRPoint & p : curve.points) {
    std::snprintf(buf, sizeof(buf), "%.6f%c%.6f", p.recall, delim, p.precision);
    os << stratum << delim << buf << '\n';
  }
}

}  // namespace cascade3d::eval
