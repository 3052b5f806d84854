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

#include "cli/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "cascade3d/geometry.hpp"
#include "io/text_util.hpp"

namespace cascade3d::cli
{
namespace fs = std::filesystem;

namespace
{

void collect_stems(const fs::path & dir, std::string_view ext, std::set<std::string> & out)
{
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    return;
  }
  for (const auto & entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ext) {
      out.insert(entry.path().stem().string());
    }
  }
}

}  // namespace

std::string_view to_string(DatasetKind kind)
{
  return kind == DatasetKind::Kitti ? "kitti" : "waymo-export";
}

DatasetKind parse_dataset_kind(std::string_view name)
{
  if (name == "kitti") {
    return DatasetKind::Kitti;
  }
  if (name == "waymo-export" || name == "waymo") {
    return DatasetKind::WaymoExport;
  }
  throw std::invalid_argument("unknown dataset kind: " + std::string(name));
}

MissingFileError::MissingFileError(const fs::path & path)
: std::runtime_error(path.string() + ": missing file"),
  path_(path)
{
}

Dataset Dataset::open(
  const fs::path & root, DatasetKind kind, const std::optional<fs::path> & split)
{
  std::error_code ec;
  if (!fs::is_directory(root, ec)) {
    throw std::invalid_argument(root.string() + ": dataset root is not a directory");
  }
  Dataset ds;
  ds.root_ = root;
  ds.kind_ = kind;

  std::set<std::string> ids;
  if (kind == DatasetKind::WaymoExport) {
    const fs::path labels = root / "labels.jsonl";
    if (fs::exists(labels, ec)) {
      for (waymo::ExportLabel & l : waymo::read_labels(labels)) {
        ids.insert(l.frame_id);
        ds.export_labels_[l.frame_id].push_back(std::move(l));
      }
    }
  } else {
    collect_stems(root / "label_2", ".txt", ids);
  }
  collect_stems(root / "velodyne", ".bin", ids);

  if (split) {
    std::ifstream in(*split);
    if (!in) {
      throw MissingFileError(*split);
    }
    std::set<std::string> wanted;
    std::string line;
    while (std::getline(in, line)) {
      const std::string_view id = detail::trim(line);
      if (!id.empty()) {
        wanted.insert(kind == DatasetKind::Kitti ? kitti::frame_file_stem(id) : std::string(id));
      }
    }
    ids = std::move(wanted);
  }
  ds.ids_.assign(ids.begin(), ids.end());
  return ds;
}

fs::path Dataset::cloud_path(const std::string & id) const
{
  return root_ / "velodyne" / (id + ".bin");
}

fs::path Dataset::label_path(const std::string & id) const
{
  return kind_ == DatasetKind::Kitti ? root_ / "label_2" / (id + ".txt") : root_ / "labels.jsonl";
}

fs::path Dataset::calib_path(const std::string & id) const
{
  return root_ / "calib" / (id + ".txt");
}

PointCloud Dataset::load_cloud(const std::string & id, std::size_t * dropped) const
{
  const fs::path p = cloud_path(id);
  std::error_code ec;
  if (!fs::is_regular_file(p, ec)) {
    throw MissingFileError(p);
  }
  kitti::ReadStats stats;
  PointCloud cloud = kitti::read_velodyne_bin(p, &stats);
  if (dropped) {
    *dropped = stats.dropped_non_finite;
  }
  return cloud;
}

kitti::CalibBundle Dataset::load_calib(const std::string & id) const
{
  const fs::path p = calib_path(id);
  std::error_code ec;
  if (!fs::is_regular_file(p, ec)) {
    throw MissingFileError(p);
  }
  return kitti::parse_calib_file(p);
}

FrameData Dataset::load(const std::string & id, bool with_cloud) const
{
  FrameData f;
  f.id = id;
  if (with_cloud) {
    f.cloud = load_cloud(id, &f.dropped_points);
  }
  if (kind_ == DatasetKind::WaymoExport) {
    const auto it = export_labels_.find(id);
    if (it != export_labels_.end()) {
      for (const waymo::ExportLabel & l : it->second) {
        f.objects.push_back({l.class_name, l.box, kitti::Difficulty::Easy, l.num_points});
      }
    }
    return f;
  }

  const fs::path lp = label_path(id);
  std::error_code ec;
  if (!fs::is_regular_file(lp, ec)) {
    throw MissingFileError(lp);
  }
  const std::vector<kitti::Label> labels = kitti::parse_label_file(lp);
  f.calib = load_calib(id);
  for (const kitti::Label & l : labels) {
    if (l.is_dont_care()) {
      continue;
    }
    ObjectRecord o;
    o.class_name = l.class_name;
    o.box = kitti::camera_box_to_lidar(l, *f.calib);
    o.difficulty = kitti::difficulty_of(l);
    if (f.cloud) {
      o.num_points = points_in_box(o.box, *f.cloud).size();
    }
    f.objects.push_back(std::move(o));
  }
  return f;
}

}  // namespace cascade3d::cli
