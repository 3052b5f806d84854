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

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>
#include <vector>

#include "cascade3d/evaluation.hpp"
#include "cascade3d/geometry.hpp"
#include "support/oracles.hpp"

using namespace cascade3d;
using namespace cascade3d::eval;
using kitti::Difficulty;

namespace
{

const Box3D kGt{0.0, 0.0, 0.0, 4.0, 2.0, 1.5, 0.0};

// Sliding along the length gives IoU (4 - d) / (4 + d).
Box3D shifted(double iou)
{
  Box3D b = kGt;
  b.cx = 4.0 * (1.0 - iou) / (1.0 + iou);
  return b;
}

GroundTruth car(const Box3D & b, Difficulty d = Difficulty::Easy, double q = 1.0, std::size_t pts = 50)
{
  return make_ground_truth(b, "Car", d, q, pts);
}

DetectionRecord det(const Box3D & b, double score, std::string cls = "Car")
{
  return {"f", b, std::move(cls), score};
}

std::size_t count(const std::vector<DetStatus> & v, DetStatus s)
{
  return static_cast<std::size_t>(std::count(v.begin(), v.end(), s));
}

}  // namespace

TEST_CASE("matching")
{
  CHECK(iou_3d(shifted(0.8), kGt) == doctest::Approx(0.8));

  FrameEvalRecord f{"f", {det(shifted(0.8), 0.9)}, {car(kGt)}};
  FrameMatch m = match_detections(f, "Car", IouKind::ThreeD, 0.7);
  CHECK(m.detections[0] == DetStatus::TruePositive);
  CHECK(m.assigned_gt[0] == 0);
  CHECK(m.ground_truths[0] == GtStatus::Matched);

  f.detections = {det(shifted(0.75), 0.4), det(shifted(0.9), 0.8)};
  m = match_detections(f, "Car", IouKind::ThreeD, 0.7);
  CHECK(m.detections[1] == DetStatus::TruePositive);
  CHECK(m.detections[0] == DetStatus::FalsePositive);

  f.detections = {det(shifted(0.65), 0.9)};
  m = match_detections(f, "Car", IouKind::ThreeD, 0.7);
  CHECK(m.detections[0] == DetStatus::FalsePositive);
  CHECK(m.ground_truths[0] == GtStatus::Missed);
  CHECK(match_detections(f, "Car", IouKind::ThreeD, 0.5).detections[0] == DetStatus::TruePositive);

  f.detections = {det(kGt, 0.9, "Pedestrian")};
  m = match_detections(f, "Car", IouKind::ThreeD, 0.7);
  CHECK(m.detections[0] == DetStatus::Ignored);
  CHECK(m.ground_truths[0] == GtStatus::Missed);

  CHECK_THROWS_AS(match_detections(f, "Car", IouKind::ThreeD, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(match_detections(f, "Car", IouKind::ThreeD, 0.0), std::invalid_argument);
}

TEST_CASE("two detections on one ground truth agree with exhaustive assignment")
{
  // Exhaustive: try each detection as the single TP; the top-scored one wins
  // because precision at the first threshold is what differs.
  FrameEvalRecord f{"f", {det(shifted(0.95), 0.3), det(shifted(0.72), 0.6)}, {car(kGt)}};
  const FrameMatch m = match_detections(f, "Car", IouKind::ThreeD, 0.7);
  CHECK(m.detections[1] == DetStatus::TruePositive);
  CHECK(m.detections[0] == DetStatus::FalsePositive);
}

TEST_CASE("ignored ground truths absorb matches")
{
  Box3D far = kGt;
  far.cx = 30.0;
  FrameEvalRecord f{"f",
                    {det(kGt, 0.9), det(far, 0.8)},
                    {car(kGt, Difficulty::Hard), car(far, Difficulty::Easy)}};
  const auto strata = kitti_strata();
  const FrameMatch easy = match_detections(f, "Car", IouKind::ThreeD, 0.7, strata[0].filter);
  CHECK(easy.detections[0] == DetStatus::Ignored);
  CHECK(easy.assigned_gt[0] == 0);
  CHECK(easy.ground_truths[0] == GtStatus::Ignored);
  CHECK(easy.detections[1] == DetStatus::TruePositive);
}

TEST_CASE("precision recall groups tied scores")
{
  const std::vector<ScoredOutcome> outcomes{{0.9, true}, {0.5, false}, {0.5, true}, {0.2, false}};
  const PrCurve c = precision_recall(outcomes, 4);
  REQUIRE(c.points.size() == 3);
  CHECK(c.points[0].recall == 0.25);
  CHECK(c.points[0].precision == 1.0);
  CHECK(c.points[1].recall == 0.5);
  CHECK(c.points[1].precision == doctest::Approx(2.0 / 3.0));
  CHECK(c.points[2].precision == 0.5);
  CHECK(precision_recall(outcomes, 0).points.empty());
}

TEST_CASE("interpolated AP by hand")
{
  PrCurve perfect = precision_recall(std::vector<ScoredOutcome>{{0.9, true}, {0.8, true}}, 2);
  CHECK(ap_interpolated(perfect, RecallPositions::R11) == doctest::Approx(1.0));
  CHECK(ap_interpolated(perfect, RecallPositions::R40) == doctest::Approx(1.0));

  const PrCurve half = precision_recall(std::vector<ScoredOutcome>{{0.9, true}}, 2);
  CHECK(*ap_interpolated(half, RecallPositions::R11) == doctest::Approx(6.0 / 11.0));
  CHECK(*ap_interpolated(half, RecallPositions::R40) == doctest::Approx(0.5));

  const PrCurve none = precision_recall({}, 3);
  CHECK(ap_interpolated(none, RecallPositions::R11) == 0.0);
  CHECK(ap_interpolated(none, RecallPositions::R40) == 0.0);

  CHECK_FALSE(ap_interpolated(precision_recall({}, 0), RecallPositions::R40).has_value());
  CHECK(to_string(RecallPositions::R40) == "AP40");
}

TEST_CASE("AP equals the definitional oracle on every small instance")
{
  std::size_t instances = 0;
  std::size_t mismatches = 0;
  oracle::enumerate_toy_instances([&](const oracle::ToyInstance & inst) {
    const FrameEvalRecord f = oracle::toy_frame(inst);
    for (double thr : {0.7, 0.5}) {
      EvalConfig cfg;
      cfg.iou_threshold = thr;
      cfg.stratification = Stratification::None;
      for (RecallPositions pos : {RecallPositions::R11, RecallPositions::R40}) {
        cfg.positions = pos;
        const auto got = evaluate(std::span(&f, 1), cfg)[0].ap;
        const auto want = oracle::definitional_ap(inst, static_cast<int>(pos), thr);
        if (got != want) {
          ++mismatches;
        }
      }
    }

    const FrameMatch m = match_detections(f, "Car", IouKind::ThreeD, 0.5);
    CHECK(count(m.detections, DetStatus::TruePositive) <=
          std::min<std::size_t>(inst.dets.size(), static_cast<std::size_t>(inst.num_gt)));
    ++instances;
  });
  CHECK(instances > 10000);
  CHECK(mismatches == 0);
}

TEST_CASE("raising a true positive above every false positive never lowers AP")
{
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> grid(0, 9);
  for (int trial = 0; trial < 2000; ++trial) {
    oracle::ToyInstance inst;
    inst.num_gt = 3;
    std::vector<int> targets{0, 1, 2};
    std::shuffle(targets.begin(), targets.end(), rng);
    for (int k = 0; k < 5; ++k) {
      oracle::ToyDet d;
      d.score = 0.1 * grid(rng) * 0.9;
      if (k < 3) {
        d.aim = static_cast<oracle::Aim>(grid(rng) % 3);
        d.gt = targets[static_cast<std::size_t>(k)];
      }
      inst.dets.push_back(d);
    }
    for (RecallPositions pos : {RecallPositions::R11, RecallPositions::R40}) {
      EvalConfig cfg;
      cfg.positions = pos;
      cfg.stratification = Stratification::None;
      FrameEvalRecord f = oracle::toy_frame(inst);
      const double before = *evaluate(std::span(&f, 1), cfg)[0].ap;
      const FrameMatch m = match_detections(f, "Car", IouKind::ThreeD, 0.7);
      for (std::size_t d = 0; d < f.detections.size(); ++d) {
        if (m.detections[d] != DetStatus::TruePositive) {
          continue;
        }
        FrameEvalRecord g = f;
        g.detections[d].score = 0.95;
        CHECK(*evaluate(std::span(&g, 1), cfg)[0].ap >= before - 1e-15);
      }
    }
  }
}

TEST_CASE("KITTI strata are cumulative")
{
  std::vector<GroundTruth> gts;
  std::vector<DetectionRecord> dets;
  const Difficulty levels[] = {Difficulty::Easy, Difficulty::Moderate, Difficulty::Hard,
                               Difficulty::Ignored};
  for (int i = 0; i < 4; ++i) {
    Box3D b = kGt;
    b.cx = 10.0 * i;
    gts.push_back(car(b, levels[i]));
    dets.push_back(det(b, 0.9 - 0.1 * i));
  }
  const std::vector<FrameEvalRecord> frames{{"f", dets, gts}};
  const auto rows = evaluate(frames, EvalConfig{});
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].stratum == "Easy");
  CHECK(rows[0].num_gt == 1);
  CHECK(rows[1].num_gt == 2);
  CHECK(rows[2].num_gt == 3);
  for (const ApRow & r : rows) {
    CHECK(r.ap == doctest::Approx(1.0));
    CHECK(r.metric == "AP40_3D");
  }
}

TEST_CASE("Waymo levels and distance bins")
{
  const auto strata = waymo_strata();
  REQUIRE(strata.size() == 8);
  CHECK(strata[0].name == "LEVEL_1");
  CHECK(strata[4].name == "LEVEL_2");
  CHECK(strata[7].name == "LEVEL_2/50m-inf");

  auto with_points = [](std::size_t n, double x) {
    Box3D b = kGt;
    b.cx = x;
    return make_ground_truth(b, "Vehicle", Difficulty::Easy, 1.0, n);
  };
  const GroundTruth five = with_points(5, 10.0);
  const GroundTruth one = with_points(1, 40.0);
  const GroundTruth zero = with_points(0, 60.0);
  CHECK(strata[0].filter.gt(five));
  CHECK(strata[4].filter.gt(five));
  CHECK_FALSE(strata[0].filter.gt(one));
  CHECK(strata[4].filter.gt(one));
  CHECK_FALSE(strata[0].filter.gt(zero));
  CHECK_FALSE(strata[4].filter.gt(zero));
  CHECK(strata[1].filter.gt(five));
  CHECK_FALSE(strata[2].filter.gt(five));
  CHECK(strata[6].filter.gt(one));
  CHECK(with_points(5, 30.0).distance == 30.0);
  CHECK(strata[2].filter.gt(with_points(5, 30.0)));

  std::vector<DetectionRecord> dets{{"f", five.box, "Vehicle", 0.9}, {"f", one.box, "Vehicle", 0.8}};
  const std::vector<FrameEvalRecord> frames{{"f", dets, {five, one, zero}}};
  EvalConfig cfg;
  cfg.class_name = "Vehicle";
  cfg.stratification = Stratification::WaymoLevels;
  const auto rows = evaluate(frames, cfg);
  REQUIRE(rows.size() == 8);
  CHECK(rows[0].num_gt == 1);
  CHECK(rows[0].ap == doctest::Approx(1.0));
  CHECK(rows[4].num_gt == 2);
  CHECK(rows[4].ap == doctest::Approx(1.0));
  CHECK_FALSE(rows[3].ap.has_value());
  CHECK_FALSE(rows[7].ap.has_value());
}

TEST_CASE("an all-inclusive stratum equals the unstratified result")
{
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<FrameEvalRecord> frames;
  for (int f = 0; f < 20; ++f) {
    FrameEvalRecord fr{std::to_string(f), {}, {}};
    for (int g = 0; g < 4; ++g) {
      Box3D b = kGt;
      b.cx = 10.0 * g;
      fr.ground_truths.push_back(car(b, static_cast<Difficulty>(g % 3), u(rng)));
      Box3D d = b;
      d.cx += 1.5 * u(rng);
      fr.detections.push_back({fr.frame_id, d, "Car", u(rng)});
    }
    frames.push_back(fr);
  }
  EvalConfig plain;
  plain.stratification = Stratification::None;
  EvalConfig custom = plain;
  custom.custom_strata = {{"everything", {[](const GroundTruth &) { return true; },
                                          [](const DetectionRecord &) { return true; }}}};
  for (RecallPositions pos : {RecallPositions::R11, RecallPositions::R40}) {
    plain.positions = custom.positions = pos;
    const auto a = evaluate(frames, plain);
    const auto b = evaluate(frames, custom);
    CHECK(a[0].ap.value() == b[0].ap.value());
    CHECK(a[0].num_gt == b[0].num_gt);
  }
}

TEST_CASE("completeness-binned AP")
{
  std::vector<GroundTruth> gts;
  std::vector<DetectionRecord> dets;
  for (int i = 0; i < 6; ++i) {
    Box3D b = kGt;
    b.cx = 10.0 * i;
    const double q = i < 3 ? 0.2 : 0.8;
    gts.push_back(car(b, Difficulty::Easy, q));
    if (q >= 0.5) {
      dets.push_back(det(b, 0.9));
    }
  }
  const std::vector<FrameEvalRecord> frames{{"f", dets, gts}};
  const std::vector<double> edges{0.0, 0.5, 1.0};
  const auto bins = pc_binned_ap(frames, edges, EvalConfig{});
  REQUIRE(bins.size() == 2);
  CHECK(bins[0].ap == 0.0);
  CHECK(bins[0].num_gt == 3);
  CHECK(bins[1].ap == doctest::Approx(1.0));

  const std::vector<double> three{0.0, 0.1, 0.5, 1.0};
  const auto sparse = pc_binned_ap(frames, three, EvalConfig{});
  CHECK_FALSE(sparse[0].ap.has_value());

  // Q = 1 lands in the closed last bin.
  std::vector<FrameEvalRecord> full{{"f", {det(kGt, 0.5)}, {car(kGt, Difficulty::Easy, 1.0)}}};
  CHECK(pc_binned_ap(full, edges, EvalConfig{})[1].num_gt == 1);

  const std::vector<double> bad{0.0, 0.5, 0.5, 1.0};
  CHECK_THROWS_AS(pc_binned_ap(frames, bad, EvalConfig{}), std::invalid_argument);
  const std::vector<double> one_edge{0.0};
  CHECK_THROWS_AS(pc_binned_ap(frames, one_edge, EvalConfig{}), std::invalid_argument);

  std::ostringstream os;
  write_binned_ap(os, sparse, "AP40_3D");
  CHECK(os.str().find("0.0000,0.1000,AP40_3D,no-GT,0\n") != std::string::npos);
}

TEST_CASE("recall proportional to completeness gives rising binned AP")
{
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<FrameEvalRecord> frames;
  for (int f = 0; f < 400; ++f) {
    FrameEvalRecord fr{std::to_string(f), {}, {}};
    for (int g = 0; g < 10; ++g) {
      Box3D b = kGt;
      b.cx = 10.0 * g;
      const double q = u(rng);
      fr.ground_truths.push_back(car(b, Difficulty::Easy, q));
      if (u(rng) < q) {
        fr.detections.push_back({fr.frame_id, b, "Car", u(rng)});
      }
    }
    Box3D clutter = kGt;
    clutter.cy = 50.0;
    fr.detections.push_back({fr.frame_id, clutter, "Car", u(rng)});
    frames.push_back(fr);
  }
  const std::vector<double> edges{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  const auto bins = pc_binned_ap(frames, edges, EvalConfig{});
  for (std::size_t b = 1; b < bins.size(); ++b) {
    CHECK(*bins[b].ap >= *bins[b - 1].ap);
  }
}

TEST_CASE("error analysis")
{
  FrameEvalRecord f{"f",
                    {det(shifted(0.65), 0.9), det(shifted(0.8), 0.8), det(shifted(0.3), 0.7),
                     det(kGt, 0.1)},
                    {car(kGt)}};
  const std::vector<FrameEvalRecord> frames{f};
  const ErrorBreakdown e = error_analysis(frames, 0.3);
  CHECK(e.correct == 1);
  CHECK(e.mislocalized == 1);
  CHECK(e.background == 1);
  CHECK(e.total() == 3);
  CHECK(e.ratio(e.correct) + e.ratio(e.mislocalized) + e.ratio(e.background) == doctest::Approx(1.0));

  // Strictly above the threshold.
  CHECK(error_analysis(frames, 0.7).total() == 2);

  const std::vector<FrameEvalRecord> empty{{"g", {det(kGt, 0.9), det(shifted(0.8), 0.9)}, {}}};
  const ErrorBreakdown bg = error_analysis(empty, 0.0);
  CHECK(bg.background == 2);
  CHECK(bg.total() == 2);
  CHECK_THROWS_AS(error_analysis(frames, 1.5), std::invalid_argument);

  std::ostringstream os;
  const std::vector<ErrorBreakdown> rows{e};
  write_error_breakdown(os, rows);
  CHECK(os.str().find("0.300,1,1,1,0.333333,0.333333,0.333333") != std::string::npos);
}

TEST_CASE("report tables")
{
  const std::vector<ApRow> rows{{"Easy", "Car", "AP40_3D", 0.5, 2}, {"Hard", "Car", "AP40_3D", std::nullopt, 0}};
  std::ostringstream os;
  write_ap_table(os, rows);
  CHECK(os.str() == "stratum,class,metric,AP_percent,num_gt\n"
                    "Easy,Car,AP40_3D,50.0000,2\n"
                    "Hard,Car,AP40_3D,no-GT,0\n");

  std::ostringstream pr;
  write_pr_dump(pr, "Easy", precision_recall(std::vector<ScoredOutcome>{{0.9, true}}, 2));
  CHECK(pr.str() == "Easy,0.500000,1.000000\n");
}
