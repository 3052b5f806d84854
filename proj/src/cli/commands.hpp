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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cascade3d/evaluation.hpp"
#include "cli/dataset.hpp"

namespace cascade3d::cli
{

/// Exit codes: 0 success, 1 data errors (listed on the diagnostic stream),
/// 2 invalid configuration.
inline constexpr int kExitOk = 0;
inline constexpr int kExitDataError = 1;
inline constexpr int kExitUsage = 2;

struct CommonOptions
{
  std::filesystem::path dataset_root;
  DatasetKind kind = DatasetKind::Kitti;
  std::optional<std::filesystem::path> split;
  std::filesystem::path out_dir = ".";
  std::uint64_t seed = 0;
  unsigned threads = 1;
  /// Empty selects the dataset's default (Car or Vehicle).
  std::vector<std::string> classes;
};

struct PcsStatsOptions
{
  CommonOptions common;
  double bin_width = 0.05;
};

struct EvalOptions
{
  CommonOptions common;
  /// KITTI: a directory of per-frame result files. Export: a JSON-lines file.
  std::filesystem::path results;
  std::vector<eval::RecallPositions> metrics{eval::RecallPositions::R11, eval::RecallPositions::R40};
  std::vector<eval::IouKind> ious{eval::IouKind::ThreeD, eval::IouKind::Bev};
  /// Overrides the per-class default (0.7 for cars, 0.5 otherwise).
  std::optional<double> iou_threshold;
  /// Completeness bin edges for the binned table; empty disables it.
  std::vector<double> pc_bins;
  std::optional<double> error_threshold;
  bool pr_dump = false;
};

struct CascadeSimOptions
{
  CommonOptions common;
  std::string refiner = "jitter";
  double lambda = 0.5;
  std::optional<double> sigma;
  std::size_t samples = 1000;
  std::vector<int> stages{1, 2, 3};
  std::vector<double> input_ious{0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  std::size_t loss_samples = 10000;
  std::vector<double> loss_bins{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  std::string strategy = "pc-score";
};

struct VoxelStatsOptions
{
  CommonOptions common;
  std::string preset = "kitti";
};

struct ConvertOptions
{
  CommonOptions common;
  /// Write num_points as 0 instead of counting points in the clouds.
  bool skip_points = false;
};

std::vector<std::string> effective_classes(const CommonOptions & common);
double default_iou_threshold(const std::string & class_name);

int cmd_pcs_stats(const PcsStatsOptions & options, std::ostream & log);
int cmd_eval(const EvalOptions & options, std::ostream & log);
int cmd_cascade_sim(const CascadeSimOptions & options, std::ostream & log);
int cmd_voxel_stats(const VoxelStatsOptions & options, std::ostream & log);
int cmd_convert(const ConvertOptions & options, std::ostream & log);

/// Parses arguments (and an optional --config file) and runs a subcommand.
int run_cli(int argc, const char * const * argv, std::ostream & out, std::ostream & log);

}  // namespace cascade3d::cli
