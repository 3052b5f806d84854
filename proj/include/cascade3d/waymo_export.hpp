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

// Pre-exported Waymo frames: KITTI-layout .bin clouds plus a JSON-lines label
// file with LiDAR-frame boxes, one object per line:
//   {"frame": "...", "class": "...", "cx": .., "cy": .., "cz": ..,
//    "l": .., "w": .., "h": .., "yaw": .., "num_points": ..}
// Detection files use the same schema with an additional "score".

#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cascade3d/box.hpp"

namespace cascade3d::waymo
{

struct ExportLabel
{
  std::string frame_id;
  std::string class_name;
  Box3D box;
  std::size_t num_points = 0;
  std::optional<double> score;
};

/// One JSON object per line; blank lines and lines starting with '#' are skipped.
std::vector<ExportLabel> parse_labels(std::istream & in, const std::string & source = "");
std::vector<ExportLabel> read_labels(const std::filesystem::path & path);

void write_labels(std::ostream & out, std::span<const ExportLabel> labels);
void write_labels(const std::filesystem::path & path, std::span<const ExportLabel> labels);

}  // namespace cascade3d::waymo
