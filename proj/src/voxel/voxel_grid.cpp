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

#include "cascade3d/voxel_grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

#include "cascade3d/simd/kernels.hpp"

namespace cascade3d
{

VoxelConfig VoxelConfig::kitti()
{
  return {{0.0, -40.0, -3.0}, {70.4, 40.0, 1.0}, {0.05, 0.05, 0.1}};
}

VoxelConfig VoxelConfig::waymo()
{
  return {{-75.2, -75.2, -2.0}, {75.2, 75.2, 4.0}, {0.1, 0.1, 0.15}};
}

VoxelConfig VoxelConfig::preset(std::string_view name)
{
  if (name == "kitti") {
    return kitti();
  }
  if (name == "waymo") {
    return waymo();
  }
  throw std::invalid_argument("unknown voxel preset: " + std::string(name));
}

GridDims grid_dims(const VoxelConfig & config)
{
  GridDims dims{};
  for (int a = 0; a < 3; ++a) {
    const double span = config.range_max[a] - config.range_min[a];
    const double size = config.voxel_size[a];
    if (!(span > 0.0) || !(size > 0.0) || !std::isfinite(span) || !std::isfinite(size)) {
      throw std::invalid_argument("voxel config needs a positive span and voxel size per axis");
    }
    const double n = span / size;
    const double nearest = std::round(n);
    const double cells = std::fabs(n - nearest) <= 1e-9 * std::max(1.0, nearest)
                           ? nearest
                           : std::floor(n);
    if (cells < 1.0 || cells > static_cast<double>(std::numeric_limits<std::int32_t>::max())) {
      throw std::invalid_argument("voxel grid dimension out of range");
    }
    dims[a] = static_cast<std::int64_t>(cells);
  }
  return dims;
}

std::uint64_t SparseVoxelGrid::linear_index(const VoxelIndex & v) const
{
  return (static_cast<std::uint64_t>(v.ix) * static_cast<std::uint64_t>(dims_[1]) +
          static_cast<std::uint64_t>(v.iy)) *
           static_cast<std::uint64_t>(dims_[2]) +
         static_cast<std::uint64_t>(v.iz);
}

VoxelIndex SparseVoxelGrid::unlinearize(std::uint64_t key) const
{
  const auto nz = static_cast<std::uint64_t>(dims_[2]);
  const auto ny = static_cast<std::uint64_t>(dims_[1]);
  const auto iz = static_cast<std::int32_t>(key % nz);
  key /= nz;
  const auto iy = static_cast<std::int32_t>(key % ny);
  const auto ix = static_cast<std::int32_t>(key / ny);
  return {ix, iy, iz};
}

std::span<const std::uint32_t> SparseVoxelGrid::cell_points(std::size_t cell) const
{
  return std::span<const std::uint32_t>(points_).subspan(
    offsets_[cell], offsets_[cell + 1] - offsets_[cell]);
}

std::span<const std::uint32_t> SparseVoxelGrid::find(const VoxelIndex & v) const
{
  if (v.ix < 0 || v.iy < 0 || v.iz < 0 || v.ix >= dims_[0] || v.iy >= dims_[1] ||
      v.iz >= dims_[2]) {
    return {};
  }
  const auto it = lookup_.find(linear_index(v));
  if (it == lookup_.end()) {
    return {};
  }
  return cell_points(it->second);
}

std::array<double, 3> SparseVoxelGrid::cell_center(const VoxelIndex & v) const
{
  const double idx[3] = {
    static_cast<double>(v.ix), static_cast<double>(v.iy), static_cast<double>(v.iz)};
  std::array<double, 3> c{};
  for (int a = 0; a < 3; ++a) {
    c[a] = config_.range_min[a] + (idx[a] + 0.5) * config_.voxel_size[a];
  }
  return c;
}

SparseVoxelGrid voxelize(const PointCloud & cloud, const VoxelConfig & config)
{
  SparseVoxelGrid grid;
  grid.config_ = config;
  grid.dims_ = grid_dims(config);
  if (cloud.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw std::invalid_argument("point cloud too large to voxelize");
  }

  simd::QuantGrid q{};
  for (int a = 0; a < 3; ++a) {
    q.origin[a] = config.range_min[a];
    // A span that is not a multiple of the voxel size leaves a partial slab
    // below range_max; those points are outside the grid.
    q.upper[a] = std::min(
      config.range_max[a],
      config.range_min[a] + static_cast<double>(grid.dims_[a]) * config.voxel_size[a]);
    q.size[a] = config.voxel_size[a];
    q.dims[a] = static_cast<std::int32_t>(grid.dims_[a]);
  }
  const std::size_t n = cloud.size();
  std::vector<std::int32_t> ix(n);
  std::vector<std::int32_t> iy(n);
  std::vector<std::int32_t> iz(n);
  const std::size_t kept = simd::active().quantize(cloud.x(), cloud.y(), cloud.z(), q, ix, iy, iz);

  std::vector<std::pair<std::uint64_t, std::uint32_t>> keyed;
  keyed.reserve(kept);
  for (std::size_t i = 0; i < n; ++i) {
    if (ix[i] >= 0) {
      keyed.emplace_back(grid.linear_index({ix[i], iy[i], iz[i]}), static_cast<std::uint32_t>(i));
    }
  }
  // Pairs are unique (point index), so a plain sort is deterministic and
  // keeps point indices ascending within a cell.
  std::sort(keyed.begin(), keyed.end());

  grid.points_.reserve(keyed.size());
  grid.offsets_.push_back(0);
  for (std::size_t i = 0; i < keyed.size(); ++i) {
    if (i == 0 || keyed[i].first != keyed[i - 1].first) {
      if (i != 0) {
        grid.offsets_.push_back(i);
      }
      grid.keys_.push_back(keyed[i].first);
    }
    grid.points_.push_back(keyed[i].second);
  }
  if (!keyed.empty()) {
    grid.offsets_.push_back(keyed.size());
  }
  grid.lookup_.reserve(grid.keys_.size());
  for (std::size_t c = 0; c < grid.keys_.size(); ++c) {
    grid.lookup_.emplace(grid.keys_[c], c);
  }
  return grid;
}

OccupancyStats occupancy_stats(const SparseVoxelGrid & grid)
{
  OccupancyStats s;
  const GridDims & d = grid.dims();
  s.total = static_cast<std::uint64_t>(d[0]) * static_cast<std::uint64_t>(d[1]) *
            static_cast<std::uint64_t>(d[2]);
  s.nonempty = grid.cell_count();
  s.empty_fraction =
    s.total == 0 ? 1.0
                 : 1.0 - static_cast<double>(s.nonempty) / static_cast<double>(s.total);
  return s;
}

BevMap bev_collapse(const SparseVoxelGrid & grid)
{
  BevMap map;
  map.nx = grid.dims()[0];
  map.ny = grid.dims()[1];
  map.counts.assign(static_cast<std::size_t>(map.nx * map.ny), 0);
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    const VoxelIndex v = grid.cell_index(c);
    map.counts[static_cast<std::size_t>(v.ix * map.ny + v.iy)] +=
      static_cast<std::uint32_t>(grid.cell_points(c).size());
  }
  return map;
}

void write_grid_dump(std::ostream & os, const SparseVoxelGrid & grid)
{
  const VoxelConfig & c = grid.config();
  const GridDims & d = grid.dims();
  os << "# dims " << d[0] << ' ' << d[1] << ' ' << d[2] << '\n';
  os << "# range_min " << c.range_min[0] << ' ' << c.range_min[1] << ' ' << c.range_min[2]
     << '\n';
  os << "# range_max " << c.range_max[0] << ' ' << c.range_max[1] << ' ' << c.range_max[2]
     << '\n';
  os << "# voxel_size " << c.voxel_size[0] << ' ' << c.voxel_size[1] << ' ' << c.voxel_size[2]
     << '\n';
  os << "# cells " << grid.cell_count() << " points " << grid.point_count() << '\n';
  for (std::size_t i = 0; i < grid.cell_count(); ++i) {
    const VoxelIndex v = grid.cell_index(i);
    os << v.ix << ' ' << v.iy << ' ' << v.iz << ' ' << grid.cell_points(i).size() << '\n';
  }
}

}  // namespace cascade3d
