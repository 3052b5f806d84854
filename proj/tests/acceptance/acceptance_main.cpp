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

// Acceptance gate: one PASS / FAIL line per criterion, non-zero exit on any
// failure. The dataset criterion runs when CASCADE3D_KITTI_ROOT points at a
// KITTI training directory (optionally CASCADE3D_KITTI_SPLIT at a split file)
// and is reported as SKIP otherwise.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "cascade3d/completeness.hpp"
#include "cascade3d/evaluation.hpp"
#include "cascade3d/experiments.hpp"
#include "cascade3d/geometry.hpp"
#include "cascade3d/kitti.hpp"
#include "cascade3d/refiners.hpp"
#include "cascade3d/sampling.hpp"
#include "cascade3d/voxel_grid.hpp"
#include "cascade3d/waymo_export.hpp"
#include "cli/dataset.hpp"
#include "support/oracles.hpp"

using namespace cascade3d;

namespace
{

enum class Verdict { Pass, Fail, Skip };

struct Outcome
{
  Verdict verdict = Verdict::Fail;
  std::string detail;
};

Outcome check(bool ok, std::string detail)
{
  return {ok ? Verdict::Pass : Verdict::Fail, std::move(detail)};
}

std::string fmt(const char * f, auto... args)
{
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

Outcome voxel_dims()
{
  const GridDims k = grid_dims(VoxelConfig::kitti());
  const GridDims w = grid_dims(VoxelConfig::waymo());
  const bool ok = k == GridDims{1408, 1600, 40} && w == GridDims{1504, 1504, 40};
  return check(ok, fmt("kitti (%lld, %lld, %lld), waymo (%lld, %lld, %lld)", (long long)k[0],
                       (long long)k[1], (long long)k[2], (long long)w[0], (long long)w[1],
                       (long long)w[2]));
}

Outcome weight_mass()
{
  std::mt19937_64 rng(2026);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> gt_count(1, 4);
  std::uniform_int_distribution<int> prop_count(1, 40);
  const WeightStrategy strategies[] = {WeightStrategy::PCScore, WeightStrategy::IoUV1,
                                       WeightStrategy::IoUV2, WeightStrategy::Softmax};
  double worst = 0.0;
  std::size_t bad_negatives = 0;
  for (int inst = 0; inst < 1000; ++inst) {
    std::vector<Box3D> gts;
    std::vector<CompletenessResult> q;
    for (int g = gt_count(rng); g > 0; --g) {
      const Box3D b = oracle::random_box(rng, 30.0);
      CompletenessResult c;
      c.score = inst % 10 == 0 ? 0.0 : unit(rng);
      c.enclosing_box = b;
      const double s = std::cbrt(std::max(c.score, 1e-6));
      c.enclosing_box.l *= s;
      c.enclosing_box.w *= s;
      c.enclosing_box.h *= s;
      gts.push_back(b);
      q.push_back(c);
    }
    std::vector<Box3D> props;
    std::vector<int> matched;
    std::vector<bool> mask;
    std::uniform_int_distribution<int> pick(-1, static_cast<int>(gts.size()) - 1);
    for (int p = prop_count(rng); p > 0; --p) {
      const int g = pick(rng);
      Box3D b = g >= 0 ? gts[static_cast<std::size_t>(g)] : oracle::random_box(rng, 30.0);
      b.cx += unit(rng) - 0.5;
      b.yaw += 0.2 * (unit(rng) - 0.5);
      props.push_back(b);
      matched.push_back(g);
      mask.push_back(g >= 0);
    }
    const double positives = static_cast<double>(std::count(mask.begin(), mask.end(), true));
    for (WeightStrategy s : strategies) {
      const auto scores = strategy_scores(s, props, matched, gts, q);
      const TaskWeights w = task_weights(scores, mask, s);
      double sum = 0.0;
      for (std::size_t i = 0; i < mask.size(); ++i) {
        if (mask[i]) {
          sum += w.weights[i];
        } else if (w.weights[i] != 1.0) {
          ++bad_negatives;
        }
      }
      worst = std::max(worst, std::abs(sum - positives));
    }
  }
  return check(worst <= 1e-9 && bad_negatives == 0,
               fmt("max |sum_P w - |P|| = %.3g, negatives != 1: %zu", worst, bad_negatives));
}

Outcome iou_oracle()
{
  std::mt19937_64 rng(3);
  double worst_bev = 0.0;
  double worst_3d = 0.0;
  std::size_t overlapping = 0;
  for (std::uint64_t t = 0; t < 100; ++t) {
    const Box3D a = oracle::random_box(rng, 1.0);
    const Box3D b = oracle::random_box(rng, 1.0);
    worst_bev = std::max(worst_bev, std::abs(iou_bev(a, b) - oracle::mc_iou_bev(a, b, 1000000, 2 * t)));
    worst_3d = std::max(worst_3d, std::abs(iou_3d(a, b) - oracle::mc_iou_3d(a, b, 1000000, 2 * t + 1)));
    overlapping += iou_3d(a, b) > 0.0 ? 1 : 0;
  }
  return check(worst_bev <= 5e-3 && worst_3d <= 5e-3,
               fmt("max deviation bev %.2e, 3d %.2e over 100 pairs (%zu overlapping)", worst_bev,
                   worst_3d, overlapping));
}

Outcome completeness_hand_cases()
{
  const Box3D box{12.0, -3.0, -0.6, 4.0, 2.0, 1.5, 0.7};
  PointCloud corners;
  for (const auto & c : cascade3d::corners(box)) {
    corners.push_back(c[0], c[1], c[2]);
  }
  const double full = pc_score(box, corners).score;

  PointCloud single;
  single.push_back(box.cx, box.cy, box.cz);
  const double one = pc_score(box, single).score;

  // Half the length, full width and height.
  PointCloud half;
  const double c = std::cos(box.yaw);
  const double s = std::sin(box.yaw);
  for (double u : {0.0, 0.5 * box.l}) {
    for (double v : {-0.5 * box.w, 0.5 * box.w}) {
      for (double z : {-0.5 * box.h, 0.5 * box.h}) {
        half.push_back(box.cx + c * u - s * v, box.cy + s * u + c * v, box.cz + z);
      }
    }
  }
  const double halved = pc_score(box, half).score;

  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> unit(-0.5, 0.5);
  std::uniform_real_distribution<double> ang(-std::numbers::pi, std::numbers::pi);
  std::uniform_real_distribution<double> shift(-50.0, 50.0);
  double worst_rigid = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const Box3D b = oracle::random_box(rng, 20.0);
    PointCloud pts;
    for (int k = 0; k < 12; ++k) {
      const double u = unit(rng) * b.l;
      const double v = unit(rng) * b.w;
      pts.push_back(b.cx + std::cos(b.yaw) * u - std::sin(b.yaw) * v,
                    b.cy + std::sin(b.yaw) * u + std::cos(b.yaw) * v, b.cz + unit(rng) * b.h);
    }
    const double before = pc_score(b, pts).score;
    const double r = ang(rng);
    const double tx = shift(rng);
    const double ty = shift(rng);
    const double tz = 0.1 * shift(rng);
    auto move = [&](double x, double y) {
      return std::array<double, 2>{std::cos(r) * x - std::sin(r) * y + tx, std::sin(r) * x + std::cos(r) * y + ty};
    };
    PointCloud moved;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const auto p = move(pts.x()[i], pts.y()[i]);
      moved.push_back(p[0], p[1], pts.z()[i] + tz);
    }
    const auto center = move(b.cx, b.cy);
    const Box3D mb{center[0], center[1], b.cz + tz, b.l, b.w, b.h, b.yaw + r};
    worst_rigid = std::max(worst_rigid, std::abs(pc_score(mb, moved).score - before));
  }
  const bool ok = std::abs(full - 1.0) <= 1e-9 && std::abs(one) <= 1e-9 &&
                  std::abs(halved - 0.5) <= 1e-9 && worst_rigid <= 1e-9;
  return check(ok, fmt("corners %.12f, single %.3g, half %.12f, rigid drift %.2e", full, one,
                       halved, worst_rigid));
}

Outcome ap_oracle()
{
  std::size_t instances = 0;
  std::size_t mismatches = 0;
  oracle::enumerate_toy_instances([&](const oracle::ToyInstance & inst) {
    const eval::FrameEvalRecord f = oracle::toy_frame(inst);
    for (double thr : {0.7, 0.5}) {
      eval::EvalConfig cfg;
      cfg.iou_threshold = thr;
      cfg.stratification = eval::Stratification::None;
      for (auto pos : {eval::RecallPositions::R11, eval::RecallPositions::R40}) {
        cfg.positions = pos;
        if (eval::evaluate(std::span(&f, 1), cfg)[0].ap !=
            oracle::definitional_ap(inst, static_cast<int>(pos), thr)) {
          ++mismatches;
        }
      }
    }
    ++instances;
  });
  return check(mismatches == 0 && instances > 0,
               fmt("%zu instances x 2 thresholds x {AP11, AP40}, %zu mismatches", instances, mismatches));
}

Outcome cascade_gain()
{
  const auto refiner = cascade::make_refiner("jitter", 0.5);
  cascade::IouGainConfig cfg;
  cfg.samples = 1000;
  cfg.input_ious = {0.3, 0.4, 0.5, 0.6, 0.7, 0.9};
  cfg.stages = {1, 3};
  cfg.seed = 0;
  cfg.threads = std::max(1u, std::thread::hardware_concurrency());
  const auto rows = cascade::experiment_iou_gain(*refiner, cfg);
  bool ok = rows.size() == 12;
  std::string detail;
  for (std::size_t i = 0; ok && i + 1 < rows.size(); i += 2) {
    const double one = rows[i].mean_output_iou;
    const double three = rows[i + 1].mean_output_iou;
    detail += fmt("%s%.1f: %.4f/%.4f", i == 0 ? "T1/T3 " : ", ", rows[i].input_iou, one, three);
    if (rows[i].input_iou == 0.9) {
      ok = ok && std::abs(three - one) <= 0.02;
    } else {
      ok = ok && three > one;
    }
  }
  return check(ok, detail);
}

Outcome loss_balance()
{
  const auto samples = cascade::synthetic_loss_samples(10000, 7);
  std::vector<double> edges;
  for (int k = 0; k <= 10; ++k) {
    edges.push_back(0.1 * k);
  }
  edges.back() = 1.0;
  const auto d = cascade::experiment_loss_distribution(samples, edges);
  const double mass_drift = std::abs(d.weight_after - d.weight_before) / d.weight_before;
  return check(d.spread_after() < d.spread_before() && mass_drift <= 1e-6,
               fmt("bin spread %.3f -> %.3f, weight mass %.6f -> %.6f (relative drift %.2e), "
                   "loss total %.1f -> %.1f",
                   d.spread_before(), d.spread_after(), d.weight_before, d.weight_after, mass_drift,
                   d.loss_before, d.loss_after));
}

Outcome round_trips()
{
  oracle::TempDir dir("acceptance_rt");
  const kitti::CalibBundle calib = kitti::parse_calib_text(oracle::sample_calib_text());
  const kitti::CalibLookup lookup = [&](const std::string &) -> const kitti::CalibBundle & {
    return calib;
  };
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> pos(-20.0, 20.0);
  std::uniform_real_distribution<double> ext(0.5, 5.0);
  std::uniform_real_distribution<double> ang(-std::numbers::pi, std::numbers::pi);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<DetectionRecord> recs;
  for (int i = 0; i < 1000; ++i) {
    recs.push_back({std::to_string(i % 13),
                    {25.0 + pos(rng), pos(rng), -1.0 + 0.05 * pos(rng), ext(rng), ext(rng),
                     ext(rng), ang(rng)},
                    "Car",
                    unit(rng)});
  }
  kitti::write_detections(recs, lookup, dir.path());

  double worst_field = 0.0;
  double worst_box = 0.0;
  for (int f = 0; f < 13; ++f) {
    const auto parsed =
      kitti::parse_label_file(dir.path() / (kitti::frame_file_stem(std::to_string(f)) + ".txt"));
    std::size_t k = 0;
    for (const DetectionRecord & r : recs) {
      if (r.frame_id != std::to_string(f)) {
        continue;
      }
      const kitti::Label exact = kitti::lidar_box_to_camera(r.box, calib);
      const kitti::Label & got = parsed.at(k++);
      for (int a = 0; a < 3; ++a) {
        worst_field = std::max(worst_field, std::abs(got.dims_cam[a] - exact.dims_cam[a]));
        worst_field = std::max(worst_field, std::abs(got.loc_cam[a] - exact.loc_cam[a]));
      }
      worst_field = std::max(worst_field, std::abs(got.ry - exact.ry));
      worst_field = std::max(worst_field, std::abs(*got.score - r.score));
    }
  }
  auto yaw_gap = [](double a, double b) {
    return std::abs(std::remainder(a - b, 2.0 * std::numbers::pi));
  };
  auto box_gap = [&](const Box3D & a, const Box3D & b) {
    const auto x = a.as_array();
    const auto y = b.as_array();
    double g = yaw_gap(a.yaw, b.yaw);
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
      g = std::max(g, std::abs(x[i] - y[i]));
    }
    return g;
  };
  const auto back = kitti::read_detections(dir.path(), lookup);
  std::size_t matched = 0;
  for (const DetectionRecord & r : back) {
    for (const DetectionRecord & o : recs) {
      if (kitti::frame_file_stem(o.frame_id) == r.frame_id && std::abs(o.score - r.score) <= 5e-7 &&
          box_gap(o.box, r.box) <= 1e-3) {
        worst_box = std::max(worst_box, box_gap(o.box, r.box));
        ++matched;
        break;
      }
    }
  }

  double worst_conversion = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Box3D b{25.0 + pos(rng), pos(rng), -1.0 + 0.05 * pos(rng), ext(rng), ext(rng), ext(rng), ang(rng)};
    worst_conversion = std::max(
      worst_conversion, box_gap(b, kitti::camera_box_to_lidar(kitti::lidar_box_to_camera(b, calib), calib)));
  }

  std::vector<waymo::ExportLabel> labels;
  for (std::size_t i = 0; i < 200; ++i) {
    labels.push_back({"seg_" + std::to_string(i % 5), "Vehicle", recs[i].box, i, recs[i].score});
  }
  waymo::write_labels(dir.path() / "labels.jsonl", labels);
  const auto read_back = waymo::read_labels(dir.path() / "labels.jsonl");
  double worst_export = read_back.size() == labels.size() ? 0.0 : 1.0;
  for (std::size_t i = 0; i < std::min(read_back.size(), labels.size()); ++i) {
    worst_export = std::max(worst_export, box_gap(read_back[i].box, labels[i].box));
  }

  const bool ok = matched == recs.size() && worst_field <= 5e-7 + 1e-12 && worst_box <= 1e-6 &&
                  worst_conversion <= 1e-6 && worst_export <= 5e-7;
  return check(ok, fmt("devkit field %.2e, box read-back %.2e (%zu/%zu), camera<->lidar %.2e, "
                       "export %.2e",
                       worst_field, worst_box, matched, recs.size(), worst_conversion, worst_export));
}

Outcome dataset_statistics()
{
  const char * root = std::getenv("CASCADE3D_KITTI_ROOT");
  if (root == nullptr || *root == '\0') {
    return {Verdict::Skip, "CASCADE3D_KITTI_ROOT not set"};
  }
  std::optional<std::filesystem::path> split;
  if (const char * s = std::getenv("CASCADE3D_KITTI_SPLIT"); s != nullptr && *s != '\0') {
    split = s;
  }
  const cli::Dataset ds = cli::Dataset::open(root, cli::DatasetKind::Kitti, split);
  const auto & ids = ds.frame_ids();
  const VoxelConfig voxels = VoxelConfig::kitti();

  struct Partial
  {
    std::vector<double> scores;
    double cells = 0.0;
    double nonempty = 0.0;
    std::size_t failures = 0;
  };
  const unsigned threads = 8;
  std::vector<Partial> parts(threads);
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        Partial & p = parts[t];
        for (std::size_t i = next++; i < ids.size(); i = next++) {
          try {
            const cli::FrameData f = ds.load(ids[i], true);
            for (const cli::ObjectRecord & o : f.objects) {
              if (o.class_name == "Car") {
                p.scores.push_back(pc_score(o.box, *f.cloud).score);
              }
            }
            const auto stats = occupancy_stats(voxelize(*f.cloud, voxels));
            p.cells += static_cast<double>(stats.total);
            p.nonempty += static_cast<double>(stats.nonempty);
          } catch (const std::exception &) {
            ++p.failures;
          }
        }
      });
    }
  }
  std::vector<double> scores;
  double cells = 0.0;
  double nonempty = 0.0;
  std::size_t failures = 0;
  for (const Partial & p : parts) {
    scores.insert(scores.end(), p.scores.begin(), p.scores.end());
    cells += p.cells;
    nonempty += p.nonempty;
    failures += p.failures;
  }
  if (scores.empty() || cells == 0.0) {
    return {Verdict::Fail, fmt("no car ground truths or clouds read (%zu frames failed)", failures)};
  }
  const double n = static_cast<double>(scores.size());
  const double below_half = static_cast<double>(std::count_if(scores.begin(), scores.end(),
                                                              [](double q) { return q < 0.5; })) / n;
  const double below_005 = static_cast<double>(std::count_if(scores.begin(), scores.end(),
                                                             [](double q) { return q < 0.05; })) / n;
  const double empty = 1.0 - nonempty / cells;
  const bool ok = failures == 0 && below_half >= 0.5 && std::abs(below_005 - 0.10) <= 0.05 && empty > 0.9;
  return check(ok, fmt("%zu frames, %zu cars: %.1f%% below 0.5, %.1f%% below 0.05, empty voxels %.4f, "
                       "%zu frames failed",
                       ids.size(), scores.size(), 100.0 * below_half, 100.0 * below_005, empty, failures));
}

}  // namespace

int main()
{
  struct Criterion
  {
    int number;
    const char * name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
    {1, "voxel grid dimensions", voxel_dims},
    {2, "task weight mass", weight_mass},
    {3, "IoU matches Monte-Carlo", iou_oracle},
    {4, "completeness hand cases", completeness_hand_cases},
    {5, "AP matches definitional oracle", ap_oracle},
    {6, "three stages beat one", cascade_gain},
    {7, "re-weighting balances loss", loss_balance},
    {8, "round-trip fidelity", round_trips},
    {9, "KITTI completeness and sparsity", dataset_statistics},
  };
  int failed = 0;
  for (const Criterion & c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception & e) {
      o = {Verdict::Fail, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const char * tag = o.verdict == Verdict::Pass ? "PASS" : o.verdict == Verdict::Fail ? "FAIL" : "SKIP";
    std::printf("%s criterion %d: %s [%s] (%.2f s)\n", tag, c.number, c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += o.verdict == Verdict::Fail ? 1 : 0;
  }
  return failed == 0 ? 0 : 1;
}
