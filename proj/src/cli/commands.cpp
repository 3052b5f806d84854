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

#include "cli/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "cascade3d/completeness.hpp"
#include "cascade3d/experiments.hpp"
#include "cascade3d/refiners.hpp"
#include "cascade3d/voxel_grid.hpp"
#include "cascade3d/waymo_export.hpp"

namespace cascade3d::cli
{
namespace fs = std::filesystem;

namespace
{

template <class Fn>
void for_each_frame(std::size_t n, unsigned threads, Fn && fn)
{
  const auto workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, threads), n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      fn(i);
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        fn(i);
      }
    });
  }
}

std::string num(double v, const char * format = "%.9g")
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, v);
  return buf;
}

template <class T>
std::string join(const std::vector<T> & items, char sep = ',')
{
  std::ostringstream os;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) {
      os << sep;
    }
    if constexpr (std::is_floating_point_v<T>) {
      os << num(items[i]);
    } else {
      os << items[i];
    }
  }
  return os.str();
}

std::string common_echo(std::string_view command, const CommonOptions & c, bool with_dataset = true)
{
  std::ostringstream os;
  os << "cascade3d " << command << " seed=" << c.seed;
  if (with_dataset) {
    os << " dataset_kind=" << to_string(c.kind) << " dataset_root=" << c.dataset_root.generic_string();
    if (c.split) {
      os << " split=" << c.split->generic_string();
    }
    os << " classes=" << join(effective_classes(c));
  }
  return os.str();
}

std::ofstream open_table(const fs::path & dir, const std::string & name, const std::string & echo)
{
  fs::create_directories(dir);
  std::ofstream out(dir / name);
  if (!out) {
    throw std::runtime_error((dir / name).string() + ": cannot open for writing");
  }
  cascade::write_config_echo(out, echo);
  return out;
}

void require_root(const CommonOptions & c)
{
  if (c.dataset_root.empty()) {
    throw std::invalid_argument("--dataset-root is required");
  }
}

// Reports per-frame problems in frame order.
int report(const std::vector<std::vector<std::string>> & problems, std::ostream & log)
{
  std::size_t count = 0;
  for (const auto & frame : problems) {
    for (const std::string & p : frame) {
      log << "error: " << p << '\n';
      ++count;
    }
  }
  if (count > 0) {
    log << count << " problem(s) encountered; affected frames were skipped\n";
    return kExitDataError;
  }
  return kExitOk;
}

struct LoadedFrame
{
  std::optional<FrameData> data;
  std::vector<std::string> problems;
};

std::vector<LoadedFrame> load_frames(const Dataset & ds, bool with_cloud, unsigned threads)
{
  const auto & ids = ds.frame_ids();
  std::vector<LoadedFrame> out(ids.size());
  for_each_frame(ids.size(), threads, [&](std::size_t i) {
    try {
      out[i].data = ds.load(ids[i], with_cloud);
    } catch (const std::exception & e) {
      out[i].problems.push_back("frame " + ids[i] + ": " + e.what());
    }
  });
  return out;
}

}  // namespace

std::vector<std::string> effective_classes(const CommonOptions & common)
{
  if (!common.classes.empty()) {
    return common.classes;
  }
  return {common.kind == DatasetKind::Kitti ? "Car" : "Vehicle"};
}

double default_iou_threshold(const std::string & class_name)
{
  return class_name == "Car" || class_name == "Vehicle" ? 0.7 : 0.5;
}

int cmd_pcs_stats(const PcsStatsOptions & options, std::ostream & log)
{
  const CommonOptions & c = options.common;
  require_root(c);
  const Dataset ds = Dataset::open(c.dataset_root, c.kind, c.split);
  const std::vector<std::string> classes = effective_classes(c);
  const std::set<std::string> wanted(classes.begin(), classes.end());

  struct FrameScores
  {
    std::vector<ScoreRow> rows;
    std::vector<CompletenessResult> results;
  };
  const auto & ids = ds.frame_ids();
  std::vector<FrameScores> scores(ids.size());
  std::vector<std::vector<std::string>> problems(ids.size());
  for_each_frame(ids.size(), c.threads, [&](std::size_t i) {
    try {
      const FrameData f = ds.load(ids[i], true);
      for (std::size_t j = 0; j < f.objects.size(); ++j) {
        const ObjectRecord & o = f.objects[j];
        if (!wanted.contains(o.class_name)) {
          continue;
        }
        if (o.box.degenerate()) {
          problems[i].push_back("frame " + ids[i] + " object " + std::to_string(j) + ": degenerate box");
          continue;
        }
        const CompletenessResult r = pc_score(o.box, *f.cloud);
        scores[i].rows.push_back({ids[i], j, o.class_name, r.score, r.point_count});
        scores[i].results.push_back(r);
      }
    } catch (const std::exception & e) {
      problems[i].push_back("frame " + ids[i] + ": " + e.what());
    }
  });

  std::vector<ScoreRow> rows;
  std::map<std::string, std::vector<CompletenessResult>> by_class;
  for (const FrameScores & s : scores) {
    for (std::size_t k = 0; k < s.rows.size(); ++k) {
      rows.push_back(s.rows[k]);
      by_class[s.rows[k].class_name].push_back(s.results[k]);
    }
  }

  const std::string echo = common_echo("pcs-stats", c) + " bin_width=" + num(options.bin_width);
  {
    std::ofstream out = open_table(c.out_dir, "pcs_scores.csv", echo);
    write_score_table(out, rows);
  }
  {
    std::ofstream out = open_table(c.out_dir, "pcs_histogram.csv", echo);
    out << "class,bin_lo,bin_hi,fraction,count\n";
    for (const std::string & cls : classes) {
      for (const HistogramBin & b : pc_score_histogram(by_class[cls], options.bin_width)) {
        out << cls << ',' << num(b.lo, "%.4f") << ',' << num(b.hi, "%.4f") << ','
            << num(b.fraction, "%.6f") << ',' << b.count << '\n';
      }
    }
  }
  {
    std::ofstream out = open_table(c.out_dir, "pcs_summary.csv", echo);
    out << "class,objects,sparse,modest,complete,fraction_below_0.05,fraction_below_0.5,mean_score\n";
    for (const std::string & cls : classes) {
      const auto & rs = by_class[cls];
      std::size_t level[3] = {0, 0, 0};
      std::size_t below_005 = 0;
      std::size_t below_05 = 0;
      double sum = 0.0;
      for (const CompletenessResult & r : rs) {
        ++level[static_cast<int>(sparsity_level(r.score))];
        below_005 += r.score < 0.05 ? 1 : 0;
        below_05 += r.score < 0.5 ? 1 : 0;
        sum += r.score;
      }
      const double n = static_cast<double>(std::max<std::size_t>(1, rs.size()));
      out << cls << ',' << rs.size() << ',' << level[0] << ',' << level[1] << ',' << level[2] << ','
          << num(static_cast<double>(below_005) / n, "%.6f") << ','
          << num(static_cast<double>(below_05) / n, "%.6f") << ',' << num(sum / n, "%.6f") << '\n';
    }
  }
  log << "pcs-stats: " << rows.size() << " objects from " << ids.size() << " frames\n";
  return report(problems, log);
}

int cmd_eval(const EvalOptions & options, std::ostream & log)
{
  const CommonOptions & c = options.common;
  require_root(c);
  if (options.results.empty()) {
    throw std::invalid_argument("--results is required");
  }
  if (options.metrics.empty() || options.ious.empty()) {
    throw std::invalid_argument("at least one metric and one IoU kind are required");
  }
  const Dataset ds = Dataset::open(c.dataset_root, c.kind, c.split);
  const std::vector<std::string> classes = effective_classes(c);
  const auto & ids = ds.frame_ids();
  const bool need_scores = !options.pc_bins.empty();
  std::vector<LoadedFrame> loaded = load_frames(ds, need_scores, c.threads);

  std::vector<std::vector<std::string>> problems(ids.size());
  std::map<std::string, std::size_t> index_of;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    index_of[ids[i]] = i;
    problems[i] = loaded[i].problems;
  }

  // Detections.
  std::vector<DetectionRecord> dets;
  std::set<std::string> det_frames;
  if (c.kind == DatasetKind::Kitti) {
    std::error_code ec;
    if (!fs::is_directory(options.results, ec)) {
      throw std::invalid_argument(options.results.string() + ": results directory not found");
    }
    for (const auto & entry : fs::directory_iterator(options.results)) {
      if (entry.is_regular_file() && entry.path().extension() == ".txt") {
        det_frames.insert(entry.path().stem().string());
      }
    }
    const kitti::CalibLookup lookup = [&](const std::string & id) -> const kitti::CalibBundle & {
      const auto it = index_of.find(id);
      if (it == index_of.end() || !loaded[it->second].data || !loaded[it->second].data->calib) {
        throw MissingFileError(ds.calib_path(id));
      }
      return *loaded[it->second].data->calib;
    };
    std::vector<std::string> missing;
    for (const std::string & id : ids) {
      if (!det_frames.contains(id)) {
        missing.push_back(id);
      }
    }
    std::vector<std::string> unknown;
    for (const std::string & id : det_frames) {
      if (!index_of.contains(id)) {
        unknown.push_back(id);
      }
    }
    if (!missing.empty() || !unknown.empty()) {
      std::string msg = "frame ids differ between ground truth and results;";
      if (!unknown.empty()) {
        msg += " results only: " + join(unknown, ' ') + ";";
      }
      if (!missing.empty()) {
        msg += " ground truth only: " + join(missing, ' ') + ";";
      }
      throw std::runtime_error(msg);
    }
    dets = kitti::read_detections(options.results, lookup);
  } else {
    for (const waymo::ExportLabel & l : waymo::read_labels(options.results)) {
      if (!l.score) {
        throw std::runtime_error(options.results.string() + ": detection without a score");
      }
      det_frames.insert(l.frame_id);
      dets.push_back({l.frame_id, l.box, l.class_name, *l.score});
    }
    std::vector<std::string> unknown;
    for (const std::string & id : det_frames) {
      if (!index_of.contains(id)) {
        unknown.push_back(id);
      }
    }
    if (!unknown.empty()) {
      throw std::runtime_error(
        "frame ids differ between ground truth and results; results only: " + join(unknown, ' '));
    }
  }

  std::vector<eval::FrameEvalRecord> frames(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    frames[i].frame_id = ids[i];
  }
  for_each_frame(ids.size(), c.threads, [&](std::size_t i) {
    if (!loaded[i].data) {
      return;
    }
    const FrameData & f = *loaded[i].data;
    for (std::size_t j = 0; j < f.objects.size(); ++j) {
      const ObjectRecord & o = f.objects[j];
      double q = 0.0;
      if (need_scores) {
        if (o.box.degenerate()) {
          problems[i].push_back("frame " + ids[i] + " object " + std::to_string(j) + ": degenerate box");
          continue;
        }
        q = pc_score(o.box, *f.cloud).score;
      }
      frames[i].ground_truths.push_back(
        eval::make_ground_truth(o.box, o.class_name, o.difficulty, q, o.num_points.value_or(0)));
    }
  });
  for (DetectionRecord & d : dets) {
    frames[index_of.at(d.frame_id)].detections.push_back(std::move(d));
  }
  std::vector<eval::FrameEvalRecord> usable;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (loaded[i].data) {
      usable.push_back(std::move(frames[i]));
    }
  }

  std::vector<std::string> metric_names;
  for (auto m : options.metrics) {
    metric_names.emplace_back(eval::to_string(m));
  }
  std::vector<std::string> iou_names;
  for (auto k : options.ious) {
    iou_names.emplace_back(eval::to_string(k));
  }
  std::string echo = common_echo("eval", c) + " results=" + options.results.generic_string() +
                     " metrics=" + join(metric_names) + " iou=" + join(iou_names) +
                     " iou_threshold=" +
                     (options.iou_threshold ? num(*options.iou_threshold) : std::string("per-class"));
  if (need_scores) {
    echo += " pc_bins=" + join(options.pc_bins);
  }
  if (options.error_threshold) {
    echo += " error_threshold=" + num(*options.error_threshold);
  }

  const eval::Stratification strat = c.kind == DatasetKind::Kitti
                                       ? eval::Stratification::KittiDifficulty
                                       : eval::Stratification::WaymoLevels;
  std::vector<eval::ApRow> rows;
  std::ofstream binned;
  std::ofstream pr;
  if (need_scores) {
    binned = open_table(c.out_dir, "eval_pc_binned.csv", echo);
  }
  if (options.pr_dump) {
    pr = open_table(c.out_dir, "eval_pr.csv", echo);
    pr << "class,metric,stratum,recall,precision\n";
  }
  bool first_bins = true;
  for (const std::string & cls : classes) {
    for (eval::IouKind kind : options.ious) {
      for (eval::RecallPositions pos : options.metrics) {
        eval::EvalConfig cfg;
        cfg.class_name = cls;
        cfg.iou_kind = kind;
        cfg.iou_threshold = options.iou_threshold.value_or(default_iou_threshold(cls));
        cfg.positions = pos;
        cfg.stratification = strat;
        const auto r = eval::evaluate(usable, cfg);
        rows.insert(rows.end(), r.begin(), r.end());
        const std::string metric =
          std::string(eval::to_string(pos)) + "_" + std::string(eval::to_string(kind));
        if (need_scores) {
          const auto bins = eval::pc_binned_ap(usable, options.pc_bins, cfg);
          eval::write_binned_ap(binned, bins, cls + "/" + metric, ',', first_bins);
          first_bins = false;
        }
        if (options.pr_dump && pos == options.metrics.front()) {
          for (const eval::Stratum & s : eval::strata_for(strat)) {
            eval::write_pr_dump(
              pr, cls + "," + std::string(eval::to_string(kind)) + "," + s.name,
              eval::pooled_curve(usable, cfg, s.filter));
          }
        }
      }
    }
  }
  {
    std::ofstream out = open_table(c.out_dir, "eval_ap.csv", echo);
    eval::write_ap_table(out, rows);
  }
  if (options.error_threshold) {
    std::ofstream out = open_table(c.out_dir, "eval_errors.csv", echo);
    out << "class,";
    bool first = true;
    for (const std::string & cls : classes) {
      std::ostringstream tmp;
      const eval::ErrorBreakdown e = eval::error_analysis(usable, *options.error_threshold, cls);
      eval::write_error_breakdown(tmp, std::span<const eval::ErrorBreakdown>(&e, 1));
      const std::string text = tmp.str();
      const std::size_t nl = text.find('\n');
      if (first) {
        out << text.substr(0, nl + 1);
        first = false;
      }
      out << cls << ',' << text.substr(nl + 1);
    }
  }
  log << "eval: " << usable.size() << " frames, " << rows.size() << " AP rows\n";
  return report(problems, log);
}

int cmd_cascade_sim(const CascadeSimOptions & options, std::ostream & log)
{
  const CommonOptions & c = options.common;
  if (options.samples == 0) {
    throw std::invalid_argument("--samples must be positive");
  }
  const auto refiner = cascade::make_refiner(options.refiner, options.lambda, options.sigma);
  const WeightStrategy strategy = parse_weight_strategy(options.strategy);

  cascade::IouGainConfig gain;
  gain.input_ious = options.input_ious;
  gain.stages = options.stages;
  gain.samples = options.samples;
  gain.seed = c.seed;
  gain.threads = c.threads;
  const auto gain_rows = cascade::experiment_iou_gain(*refiner, gain);

  const auto samples =
    cascade::synthetic_loss_samples(options.loss_samples, cascade::mix_seed(c.seed, 0x10552));
  const auto dist = cascade::experiment_loss_distribution(samples, options.loss_bins, strategy);

  const std::string echo =
    common_echo("cascade-sim", c, false) + " refiner=" + refiner->describe() +
    " samples=" + std::to_string(options.samples) + " stages=" + join(options.stages) +
    " input_ious=" + join(options.input_ious) + " loss_samples=" +
    std::to_string(options.loss_samples) + " loss_bins=" + join(options.loss_bins) +
    " strategy=" + std::string(to_string(strategy));
  {
    std::ofstream out = open_table(c.out_dir, "cascade_iou_gain.csv", echo);
    cascade::write_iou_gain(out, gain_rows);
  }
  {
    std::ofstream out = open_table(c.out_dir, "cascade_loss_distribution.csv", echo);
    cascade::write_loss_distribution(out, dist);
  }
  {
    std::ofstream out = open_table(c.out_dir, "cascade_loss_spread.csv", echo);
    out << "strategy,spread_before,spread_after,weight_before,weight_after,loss_before,loss_after\n";
    out << to_string(strategy) << ',' << num(dist.spread_before()) << ','
        << num(dist.spread_after()) << ',' << num(dist.weight_before) << ','
        << num(dist.weight_after) << ',' << num(dist.loss_before) << ',' << num(dist.loss_after)
        << '\n';
  }
  log << "cascade-sim: " << gain_rows.size() << " gain rows, loss spread "
      << num(dist.spread_before(), "%.4f") << " -> " << num(dist.spread_after(), "%.4f") << '\n';
  return kExitOk;
}

int cmd_voxel_stats(const VoxelStatsOptions & options, std::ostream & log)
{
  const CommonOptions & c = options.common;
  require_root(c);
  const VoxelConfig vc = VoxelConfig::preset(options.preset);
  const GridDims dims = grid_dims(vc);
  const Dataset ds = Dataset::open(c.dataset_root, c.kind, c.split);
  const auto & ids = ds.frame_ids();

  struct Row
  {
    std::size_t points = 0;
    OccupancyStats stats;
    bool ok = false;
  };
  std::vector<Row> rows(ids.size());
  std::vector<std::vector<std::string>> problems(ids.size());
  for_each_frame(ids.size(), c.threads, [&](std::size_t i) {
    try {
      const PointCloud cloud = ds.load_cloud(ids[i]);
      rows[i].points = cloud.size();
      rows[i].stats = occupancy_stats(voxelize(cloud, vc));
      rows[i].ok = true;
    } catch (const std::exception & e) {
      problems[i].push_back("frame " + ids[i] + ": " + e.what());
    }
  });

  const std::string echo = common_echo("voxel-stats", c) + " voxel_preset=" + options.preset +
                           " dims=" + std::to_string(dims[0]) + "x" + std::to_string(dims[1]) +
                           "x" + std::to_string(dims[2]);
  std::ofstream out = open_table(c.out_dir, "voxel_stats.csv", echo);
  out << "frame,points,nonempty_voxels,total_voxels,empty_fraction\n";
  std::uint64_t nonempty = 0;
  std::uint64_t total = 0;
  std::size_t points = 0;
  std::size_t frames = 0;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (!rows[i].ok) {
      continue;
    }
    const Row & r = rows[i];
    out << ids[i] << ',' << r.points << ',' << r.stats.nonempty << ',' << r.stats.total << ','
        << num(r.stats.empty_fraction, "%.9f") << '\n';
    nonempty += r.stats.nonempty;
    total += r.stats.total;
    points += r.points;
    ++frames;
  }
  const double empty =
    total == 0 ? 1.0 : 1.0 - static_cast<double>(nonempty) / static_cast<double>(total);
  out << "aggregate," << points << ',' << nonempty << ',' << total << ',' << num(empty, "%.9f")
      << '\n';
  log << "voxel-stats: dims (" << dims[0] << ", " << dims[1] << ", " << dims[2] << "), " << frames
      << " frames, empty fraction " << num(empty, "%.6f") << '\n';
  return report(problems, log);
}

int cmd_convert(const ConvertOptions & options, std::ostream & log)
{
  const CommonOptions & c = options.common;
  require_root(c);
  if (c.kind != DatasetKind::Kitti) {
    throw std::invalid_argument("convert reads KITTI camera-frame labels");
  }
  const Dataset ds = Dataset::open(c.dataset_root, c.kind, c.split);
  const auto & ids = ds.frame_ids();
  std::vector<LoadedFrame> loaded = load_frames(ds, !options.skip_points, c.threads);
  std::vector<waymo::ExportLabel> labels;
  std::vector<std::vector<std::string>> problems(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    problems[i] = loaded[i].problems;
    if (!loaded[i].data) {
      continue;
    }
    for (const ObjectRecord & o : loaded[i].data->objects) {
      labels.push_back({ids[i], o.class_name, o.box, o.num_points.value_or(0), std::nullopt});
    }
  }
  const std::string echo = common_echo("convert", c) +
                           (options.skip_points ? " num_points=skipped" : " num_points=counted");
  std::ofstream out = open_table(c.out_dir, "labels_lidar.jsonl", echo);
  waymo::write_labels(out, labels);
  log << "convert: " << labels.size() << " boxes from " << ids.size() << " frames\n";
  return report(problems, log);
}

int run_cli(int argc, const char * const * argv, std::ostream & out, std::ostream & log)
{
  CLI::App app{"Point-completeness analysis, evaluation and cascade simulation for LiDAR 3D detection.", "cascade3d"};
  app.set_config("--config", "", "Key-value configuration file; command-line flags override it");
  app.require_subcommand(1);
  app.fallthrough();

  CommonOptions common;
  std::string kind = "kitti";
  std::string split;
  app.add_option("--dataset-root", common.dataset_root, "Dataset root directory");
  app.add_option("--dataset-kind", kind, "kitti or waymo-export")
    ->check(CLI::IsMember({"kitti", "waymo-export"}));
  app.add_option("--split", split, "File listing the frame ids to use");
  app.add_option("--out", common.out_dir, "Output directory");
  app.add_option("--seed", common.seed, "Random seed");
  app.add_option("--threads", common.threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--classes", common.classes, "Comma-separated classes")->delimiter(',');

  PcsStatsOptions pcs;
  auto * pcs_cmd = app.add_subcommand("pcs-stats", "Point completeness distribution");
  pcs_cmd->add_option("--bin-width", pcs.bin_width, "Histogram bin width")->capture_default_str();

  EvalOptions ev;
  std::vector<std::string> metrics;
  std::vector<std::string> ious;
  std::optional<double> iou_threshold;
  std::optional<double> error_threshold;
  auto * eval_cmd = app.add_subcommand("eval", "Average precision of detection results");
  eval_cmd->add_option("--results", ev.results, "Result files (directory or JSON lines)")->required();
  eval_cmd->add_option("--metric", metrics, "ap11 and/or ap40 (default both)")
    ->delimiter(',')
    ->check(CLI::IsMember({"ap11", "ap40"}));
  eval_cmd->add_option("--iou", ious, "3d and/or bev (default both)")
    ->delimiter(',')
    ->check(CLI::IsMember({"3d", "bev"}));
  eval_cmd->add_option("--iou-threshold", iou_threshold, "Match threshold for every class");
  eval_cmd->add_option("--pc-bins", ev.pc_bins, "Completeness bin edges, e.g. 0,0.3,0.6,1")
    ->delimiter(',');
  eval_cmd->add_option("--error-threshold", error_threshold, "Score threshold for error analysis");
  eval_cmd->add_flag("--pr-dump", ev.pr_dump, "Write precision-recall points");

  CascadeSimOptions sim;
  std::optional<double> sigma;
  auto * sim_cmd = app.add_subcommand("cascade-sim", "Cascade refinement experiments");
  sim_cmd->add_option("--refiner", sim.refiner, "identity, contraction or jitter")
    ->check(CLI::IsMember({"identity", "contraction", "jitter"}))
    ->capture_default_str();
  sim_cmd->add_option("--lambda", sim.lambda, "Contraction step")->capture_default_str();
  sim_cmd->add_option("--sigma", sigma, "Center jitter (m)");
  sim_cmd->add_option("--samples", sim.samples, "Proposals per input IoU")->capture_default_str();
  sim_cmd->add_option("--stages", sim.stages, "Stage counts")->delimiter(',');
  sim_cmd->add_option("--input-ious", sim.input_ious, "Input IoU grid")->delimiter(',');
  sim_cmd->add_option("--loss-samples", sim.loss_samples, "Synthetic loss samples")
    ->capture_default_str();
  sim_cmd->add_option("--loss-bins", sim.loss_bins, "Completeness bin edges")->delimiter(',');
  sim_cmd->add_option("--strategy", sim.strategy, "pc-score, iou-v1, iou-v2 or softmax")
    ->capture_default_str();

  VoxelStatsOptions vox;
  auto * vox_cmd = app.add_subcommand("voxel-stats", "Voxel occupancy");
  vox_cmd->add_option("--voxel-preset", vox.preset, "kitti or waymo")
    ->check(CLI::IsMember({"kitti", "waymo"}))
    ->capture_default_str();

  ConvertOptions conv;
  auto * conv_cmd = app.add_subcommand("convert", "Camera-frame labels to a LiDAR-frame dump");
  conv_cmd->add_flag("--skip-points", conv.skip_points, "Do not count points per box");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError & e) {
    return app.exit(e, out, log) == 0 ? kExitOk : kExitUsage;
  }

  try {
    common.kind = parse_dataset_kind(kind);
    if (!split.empty()) {
      common.split = fs::path(split);
    }
    if (*pcs_cmd) {
      pcs.common = common;
      return cmd_pcs_stats(pcs, log);
    }
    if (*eval_cmd) {
      ev.common = common;
      if (!metrics.empty()) {
        ev.metrics.clear();
        for (const std::string & m : metrics) {
          ev.metrics.push_back(m == "ap11" ? eval::RecallPositions::R11 : eval::RecallPositions::R40);
        }
      }
      if (!ious.empty()) {
        ev.ious.clear();
        for (const std::string & k : ious) {
          ev.ious.push_back(k == "3d" ? eval::IouKind::ThreeD : eval::IouKind::Bev);
        }
      }
      ev.iou_threshold = iou_threshold;
      ev.error_threshold = error_threshold;
      return cmd_eval(ev, log);
    }
    if (*sim_cmd) {
      sim.common = common;
      sim.sigma = sigma;
      return cmd_cascade_sim(sim, log);
    }
    if (*vox_cmd) {
      vox.common = common;
      return cmd_voxel_stats(vox, log);
    }
    conv.common = common;
    return cmd_convert(conv, log);
  } catch (const std::invalid_argument & e) {
    log << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception & e) {
    log << "error: " << e.what() << '\n';
    return kExitDataError;
  }
}

}  // namespace cascade3d::cli
