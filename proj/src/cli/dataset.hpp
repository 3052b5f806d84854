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

// On-disk dataset access for the command-line tool.
//
// KITTI layout:  <root>/velodyne/<id>.bin, <root>/label_2/<id>.txt,
//                <root>/calib/<id>.txt
// Export layout: <root>/velodyne/<id>.bin, <root>/labels.jsonl

#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cascade3d/box.hpp"
#include "cascade3d/kitti.hpp"
#include "cascade3d/point_cloud.hpp"
#include "cascade3d/waymo_export.hpp"

namespace cascade3d::cli
{

enum class DatasetKind { Kitti, WaymoExport };

std::string_view to_string(DatasetKind kind);
DatasetKind parse_dataset_kind(std::string_view name);

class MissingFileError : public std::runtime_error
{
public:
  explicit MissingFileError(const std::filesystem::path & path);
  const std::filesystem::path & path() const { return path_; }

private:
  std::filesystem::path path_;
};

struct ObjectRecord
{
  std::string class_name;
  /// LiDAR frame.
  Box3D box;
  kitti::Difficulty difficulty = kitti::Difficulty::Easy;
  /// Points inside the box, from the label (export) or counted in the cloud.
  std::optional<std::size_t> num_points;
};

struct FrameData
{
  std::string id;
  std::optional<PointCloud> cloud;
  std::vector<ObjectRecord> objects;
  std::optional<kitti::CalibBundle> calib;
  std::size_t dropped_points = 0;
};

class Dataset
{
public:
  /// Lists frames under `root`. With a split file only the ids it names are
  /// used, one per line.
  static Dataset open(
    const std::filesystem::path & root, DatasetKind kind,
    const std::optional<std::filesystem::path> & split = std::nullopt);

  DatasetKind kind() const { return kind_; }
  const std::filesystem::path & root() const { return root_; }
  const std::vector<std::string> & frame_ids() const { return ids_; }

  std::filesystem::path cloud_path(const std::string & id) const;
  std::filesystem::path label_path(const std::string & id) const;
  std::filesystem::path calib_path(const std::string & id) const;

  /// Throws MissingFileError for an absent file and ParseError for a bad one.
  PointCloud load_cloud(const std::string & id, std::size_t * dropped = nullptr) const;
  kitti::CalibBundle load_calib(const std::string & id) const;

  /// Objects in the LiDAR frame, DontCare removed. KITTI labels need the
  /// frame's calibration. When the cloud is loaded, point counts are filled
  /// from it for KITTI.
  FrameData load(const std::string & id, bool with_cloud) const;

private:
  std::filesystem::path root_;
  DatasetKind kind_ = DatasetKind::Kitti;
  std::vector<std::string> ids_;
  std::map<std::string, std::vector<waymo::ExportLabel>> export_labels_;
};

}  // namespace cascade3d::cli
