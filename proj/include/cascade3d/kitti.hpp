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

// KITTI object-benchmark file formats: velodyne scans, label/result text
// files and calibration files.

#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cascade3d/box.hpp"
#include "cascade3d/detection.hpp"
#include "cascade3d/point_cloud.hpp"

namespace cascade3d::kitti
{

/// Malformed input, with the offending file and (when known) line.
class ParseError : public std::runtime_error
{
public:
  ParseError(const std::string & path, std::size_t line, const std::string & what);

  const std::string & path() const { return path_; }
  std::size_t line() const { return line_; }

private:
  std::string path_;
  std::size_t line_;
};

struct ReadStats
{
  std::size_t dropped_non_finite = 0;
};

/// Packed little-endian float32 (x, y, z, intensity) records. Points with a
/// non-finite coordinate are dropped and counted in `stats`.
PointCloud read_velodyne_bin(const std::filesystem::path & path, ReadStats * stats = nullptr);
void write_velodyne_bin(const std::filesystem::path & path, const PointCloud & cloud);

struct Label
{
  std::string class_name;
  double truncation = 0.0;
  int occlusion = 0;
  double alpha = 0.0;
  /// left, top, right, bottom in pixels.
  std::array<double, 4> bbox2d{};
  /// height, width, length in meters.
  std::array<double, 3> dims_cam{};
  /// Bottom-center location in the rectified camera frame.
  std::array<double, 3> loc_cam{};
  double ry = 0.0;
  std::optional<double> score;

  bool is_dont_care() const { return class_name == "DontCare"; }
};

/// One label line (15 fields, or 16 with a trailing score).
Label parse_label_line(std::string_view line, const std::string & path = "", std::size_t line_no = 0);
std::vector<Label> parse_label_file(const std::filesystem::path & path);

/// Devkit formatting with 6 decimals; the score column only when present.
std::string format_label(const Label & label);

struct CalibBundle
{
  std::array<double, 12> P2{};
  std::array<double, 9> R0_rect{};
  std::array<double, 12> Tr_velo_to_cam{};

  /// Rectification identity and the canonical velodyne-to-camera axis
  /// permutation (cam x = -velo y, cam y = -velo z, cam z = velo x).
  static CalibBundle canonical();
};

/// Reads `KEY: v1 v2 ...` lines. R0_rect and Tr_velo_to_cam (or Tr_velo_cam)
/// are required; P2 defaults to zeros when absent. Rotation parts must be
/// orthonormal within 1e-3.
CalibBundle parse_calib_file(const std::filesystem::path & path);
CalibBundle parse_calib_text(std::string_view text, const std::string & path = "");
void validate_calib(const CalibBundle & calib, const std::string & path = "");
std::string format_calib(const CalibBundle & calib);

/// Camera label to LiDAR box: lifts the bottom center by h/2, maps it
/// through inverse(R0_rect * Tr_velo_to_cam), and sets yaw = -ry - pi/2.
/// Throws std::domain_error for a singular transform.
Box3D camera_box_to_lidar(const Label & label, const CalibBundle & calib);

/// Inverse of camera_box_to_lidar for the geometric fields (dims, loc, ry).
/// The other fields are copied from `base`; alpha and the 2D box are
/// recomputed from the camera position and P2.
Label lidar_box_to_camera(const Box3D & box, const CalibBundle & calib, Label base = {});

enum class Difficulty { Easy, Moderate, Hard, Ignored };

std::string_view to_string(Difficulty d);

/// Devkit thresholds (2D height, occlusion, truncation). DontCare is Ignored.
Difficulty difficulty_of(const Label & label);

/// "%06d" for numeric ids, otherwise the id unchanged.
std::string frame_file_stem(std::string_view frame_id);

using CalibLookup = std::function<const CalibBundle &(const std::string & frame_id)>;

/// Writes one devkit result file per frame id present in `records`, plus an
/// empty file for each id in `extra_frames` without records.
void write_detections(
  std::span<const DetectionRecord> records, const CalibLookup & calib,
  const std::filesystem::path & out_dir, std::span<const std::string> extra_frames = {});

/// Reads every *.txt in `dir`; frame ids are the file stems.
std::vector<DetectionRecord> read_detections(
  const std::filesystem::path & dir, const CalibLookup & calib);

}  // namespace cascade3d::kitti
