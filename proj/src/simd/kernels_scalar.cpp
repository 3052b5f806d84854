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

#include "kernels_impl.hpp"

#include <algorithm>
#include <cmath>

namespace cascade3d::simd::detail
{

void to_local_scalar(
  std::span<const double> x, std::span<const double> y, std::span<const double> z,
  const ZFrame & f, std::span<double> lx, std::span<double> ly, std::span<double> lz)
{
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - f.ox;
    const double dy = y[i] - f.oy;
    const double dz = z[i] - f.oz;
    const double a = f.cos_yaw * dx;
    const double b = f.sin_yaw * dy;
    const double c = f.sin_yaw * dx;
    const double d = f.cos_yaw * dy;
    lx[i] = a + b;
    ly[i] = d - c;
    lz[i] = dz;
  }
}

void rotate_z_scalar(std::span<double> x, std::span<double> y, double c, double s)
{
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = x[i];
    const double yi = y[i];
    const double a = c * xi;
    const double b = s * yi;
    const double e = s * xi;
    const double d = c * yi;
    x[i] = a - b;
    y[i] = e + d;
  }
}

void scale_scalar(std::span<double> v, double s)
{
  for (double & e : v) {
    e = e * s;
  }
}

std::size_t in_box_mask_scalar(
  std::span<const double> x, std::span<const double> y, std::span<const double> z,
  const ZFrame & f, const HalfExtents & half, std::span<std::uint8_t> mask)
{
  const double hx = half.hx + half.tolerance;
  const double hy = half.hy + half.tolerance;
  const double hz = half.hz + half.tolerance;
  std::size_t hits = 0;
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - f.ox;
    const double dy = y[i] - f.oy;
    const double dz = z[i] - f.oz;
    const double lx = f.cos_yaw * dx + f.sin_yaw * dy;
    const double ly = f.cos_yaw * dy - f.sin_yaw * dx;
    const bool inside = std::fabs(lx) <= hx && std::fabs(ly) <= hy && std::fabs(dz) <= hz;
    mask[i] = inside ? 1 : 0;
    hits += inside ? 1 : 0;
  }
  return hits;
}

Bounds3 bounds_scalar(
  std::span<const double> x, std::span<const double> y, std::span<const double> z)
{
  Bounds3 b{{x[0], y[0], z[0]}, {x[0], y[0], z[0]}};
  const std::size_t n = x.size();
  for (std::size_t i = 1; i < n; ++i) {
    b.min[0] = std::min(b.min[0], x[i]);
    b.max[0] = std::max(b.max[0], x[i]);
    b.min[1] = std::min(b.min[1], y[i]);
    b.max[1] = std::max(b.max[1], y[i]);
    b.min[2] = std::min(b.min[2], z[i]);
    b.max[2] = std::max(b.max[2], z[i]);
  }
  return b;
}

std::size_t quantize_scalar(
  std::span<const double> x, std::span<const double> y, std::span<const double> z,
  const QuantGrid & g, std::span<std::int32_t> ix, std::span<std::int32_t> iy,
  std::span<std::int32_t> iz)
{
  std::size_t kept = 0;
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double p[3] = {x[i], y[i], z[i]};
    bool ok = true;
    std::int32_t cell[3] = {0, 0, 0};
    for (int a = 0; a < 3; ++a) {
      // NaN fails both comparisons and is dropped.
      if (!(p[a] >= g.origin[a] && p[a] < g.upper[a])) {
        ok = false;
        break;
      }
      const double q = std::floor((p[a] - g.origin[a]) / g.size[a]);
      cell[a] = std::min(static_cast<std::int32_t>(q), g.dims[a] - 1);
    }
    if (ok) {
      ix[i] = cell[0];
      iy[i] = cell[1];
      iz[i] = cell[2];
      ++kept;
    } else {
      ix[i] = -1;
      iy[i] = -1;
      iz[i] = -1;
    }
  }
  return kept;
}

}  // namespace cascade3d::simd::detail
