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

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cascade3d/point_cloud.hpp"

namespace cascade3d
{

struct VoxelConfig
{
  std::array<double, 3> range_min{0.0, 0.0, 0.0};
  std::array<double, 3> range_max{1.0, 1.0, 1.0};
  std::array<double, 3> voxel_size{1.0, 1.0, 1.0};

  /// [0, 70.4] x [-40, 40] x [-3, 1] m at (0.05, 0.05, 0.1) m.
  static VoxelConfig kitti();
  /// [-75.2, 75.2]^2 x [-2, 4] m at (0.1, 0.1, 0.15) m.
  static VoxelConfig waymo();
  /// "kitti" or "waymo".
  static VoxelConfig preset(std::string_view name);
};

using GridDims = std::array<std::int64_t, 3>;

/// Per-axis floor(span / size). Spans that are an integer multiple of the
/// voxel size up to floating-point noise (relative 1e-9) round to that
/// multiple. Throws std::invalid_argument for a non-positive span or size.
GridDims grid_dims(const VoxelConfig & config);

struct VoxelIndex
{
  std::int32_t ix = 0;
  std::int32_t iy = 0;
  std::int32_t iz = 0;

  friend bool operator==(const VoxelIndex &, const VoxelIndex &) = default;
};

/// Sparse voxel occupancy. Cells are stored in linearized order
/// (x-major, then y, then z) in compressed form; empty cells are absent.
class SparseVoxelGrid
{
public:
  SparseVoxelGrid() = default;

  const VoxelConfig & config() const { return config_; }
  const GridDims & dims() const { return dims_; }

  std::size_t cell_count() const { return keys_.size(); }
  std::size_t point_count() const { return points_.size(); }

  std::uint64_t linear_index(const VoxelIndex & v) const;
  VoxelIndex unlinearize(std::uint64_t key) const;

  VoxelIndex cell_index(std::size_t cell) const { return unlinearize(keys_[cell]); }

  /// Point indices of the cell at position `cell` (0 <= cell < cell_count()).
  std::span<const std::uint32_t> cell_points(std::size_t cell) const;

  /// Point indices in voxel `v`; empty if unoccupied or out of range.
  std::span<const std::uint32_t> find(const VoxelIndex & v) const;

  /// World coordinates of the center of voxel `v`.
  std::array<double, 3> cell_center(const VoxelIndex & v) const;

private:
  friend SparseVoxelGrid voxelize(const PointCloud & cloud, const VoxelConfig & config);

  VoxelConfig config_;
  GridDims dims_{0, 0, 0};
  std::vector<std::uint64_t> keys_;
  std::vector<std::size_t> offsets_;
  std::vector<std::uint32_t> points_;
  std::unordered_map<std::uint64_t, std::size_t> lookup_;
};

/// Assigns each point in [range_min, range_max) to cell floor((p - min) / size).
SparseVoxelGrid voxelize(const PointCloud & cloud, const VoxelConfig & config);

struct OccupancyStats
{
  std::uint64_t nonempty = 0;
  std::uint64_t total = 0;
  double empty_fraction = 1.0;
};

OccupancyStats occupancy_stats(const SparseVoxelGrid & grid);

/// Dense nx * ny column counts, indexed [ix * ny + iy].
struct BevMap
{
  std::int64_t nx = 0;
  std::int64_t ny = 0;
  std::vector<std::uint32_t> counts;

  std::uint32_t at(std::int64_t ix, std::int64_t iy) const
  {
    return counts[static_cast<std::size_t>(ix * ny + iy)];
  }
};

BevMap bev_collapse(const SparseVoxelGrid & grid);

/// Text dump: a header with dims and config, then "ix iy iz count" per cell.
void write_grid_dump(std::ostream & os, const SparseVoxelGrid & grid);

}  // namespace cascade3d
