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

#include "cascade3d/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cascade3d/simd/kernels.hpp"

namespace cascade3d
{
namespace
{

simd::ZFrame frame_of(const Box3D & box)
{
  return {box.cx, box.cy, box.cz, std::cos(box.yaw), std::sin(box.yaw)};
}

double cross(const Point2 & o, const Point2 & a, const Point2 & b)
{
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

}  // namespace

PointCloud PointCloud::select(std::span<const std::size_t> indices) const
{
  PointCloud out;
  out.reserve(indices.size());
  for (std::size_t i : indices) {
    out.push_back(x_[i], y_[i], z_[i], intensity_[i]);
  }
  return out;
}

double BevPolygon::area() const
{
  const std::size_t n = vertices.size();
  if (n < 3) {
    return 0.0;
  }
  double twice = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 & p = vertices[i];
    const Point2 & q = vertices[(i + 1) % n];
    twice += p.x * q.y - q.x * p.y;
  }
  return 0.5 * twice;
}

std::array<Point2, 4> bev_corners(const Box3D & box)
{
  const double c = std::cos(box.yaw);
  const double s = std::sin(box.yaw);
  const double hl = 0.5 * box.l;
  const double hw = 0.5 * box.w;
  const double local[4][2] = {{hl, -hw}, {hl, hw}, {-hl, hw}, {-hl, -hw}};
  std::array<Point2, 4> out{};
  for (int i = 0; i < 4; ++i) {
    out[i] = {
      box.cx + c * local[i][0] - s * local[i][1], box.cy + s * local[i][0] + c * local[i][1]};
  }
  return out;
}

std::array<std::array<double, 3>, 8> corners(const Box3D & box)
{
  const auto bev = bev_corners(box);
  std::array<std::array<double, 3>, 8> out{};
  for (int i = 0; i < 4; ++i) {
    out[i] = {bev[i].x, bev[i].y, box.cz - 0.5 * box.h};
    out[i + 4] = {bev[i].x, bev[i].y, box.cz + 0.5 * box.h};
  }
  return out;
}

BevPolygon clip_convex(std::span<const Point2> subject, std::span<const Point2> clip)
{
  std::vector<Point2> output(subject.begin(), subject.end());
  std::vector<Point2> input;
  const std::size_t m = clip.size();
  for (std::size_t e = 0; e < m && !output.empty(); ++e) {
    const Point2 & a = clip[e];
    const Point2 & b = clip[(e + 1) % m];
    const double edge_len = std::hypot(b.x - a.x, b.y - a.y);
    if (edge_len <= 0.0) {
      continue;
    }
    // Signed distance of p from the edge line, positive on the inner (left) side.
    auto dist = [&](const Point2 & p) { return cross(a, b, p) / edge_len; };

    input.swap(output);
    output.clear();
    const std::size_t n = input.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Point2 & cur = input[i];
      const Point2 & prev = input[(i + n - 1) % n];
      const double dc = dist(cur);
      const double dp = dist(prev);
      const bool cur_in = dc >= -kClipEpsilon;
      const bool prev_in = dp >= -kClipEpsilon;
      if (cur_in != prev_in) {
        const double t = dp / (dp - dc);
        output.push_back({prev.x + t * (cur.x - prev.x), prev.y + t * (cur.y - prev.y)});
      }
      if (cur_in) {
        output.push_back(cur);
      }
    }
  }
  return BevPolygon{std::move(output)};
}

PointCloud to_local_frame(const Box3D & box, const PointCloud & points)
{
  PointCloud out;
  out.resize(points.size());
  simd::active().to_local(
    points.x(), points.y(), points.z(), frame_of(box), out.x(), out.y(), out.z());
  std::copy(points.intensity().begin(), points.intensity().end(), out.intensity().begin());
  return out;
}

std::vector<std::size_t> points_in_box(const Box3D & box, const PointCloud & points)
{
  std::vector<std::uint8_t> mask(points.size());
  const simd::HalfExtents half{0.5 * box.l, 0.5 * box.w, 0.5 * box.h, kContainmentTolerance};
  const std::size_t hits =
    simd::active().in_box_mask(points.x(), points.y(), points.z(), frame_of(box), half, mask);
  std::vector<std::size_t> out;
  out.reserve(hits);
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i] != 0) {
      out.push_back(i);
    }
  }
  return out;
}

Box3D smallest_enclosing_aligned_box(const Box3D & box, const PointCloud & points)
{
  if (points.empty()) {
    return {box.cx, box.cy, box.cz, 0.0, 0.0, 0.0, box.yaw};
  }
  const PointCloud local = to_local_frame(box, points);
  const simd::Bounds3 b = simd::active().bounds(local.x(), local.y(), local.z());
  const double half[3] = {0.5 * box.l, 0.5 * box.w, 0.5 * box.h};
  double lo[3];
  double hi[3];
  double mid[3];
  for (int a = 0; a < 3; ++a) {
    lo[a] = std::clamp(b.min[a], -half[a], half[a]);
    hi[a] = std::clamp(b.max[a], -half[a], half[a]);
    mid[a] = 0.5 * (lo[a] + hi[a]);
  }
  const double c = std::cos(box.yaw);
  const double s = std::sin(box.yaw);
  return {
    box.cx + c * mid[0] - s * mid[1],
    box.cy + s * mid[0] + c * mid[1],
    box.cz + mid[2],
    hi[0] - lo[0],
    hi[1] - lo[1],
    hi[2] - lo[2],
    box.yaw};
}

double bev_intersection_area(const Box3D & a, const Box3D & b)
{
  const auto pa = bev_corners(a);
  const auto pb = bev_corners(b);
  double area = clip_convex(pa, pb).area();
  if (area < kSliverArea) {
    return 0.0;
  }
  return std::min({area, a.bev_area(), b.bev_area()});
}

double iou_bev(const Box3D & a, const Box3D & b)
{
  const double inter = bev_intersection_area(a, b);
  const double uni = a.bev_area() + b.bev_area() - inter;
  if (!(uni > 0.0)) {
    return 0.0;
  }
  return std::clamp(inter / uni, 0.0, 1.0);
}

double iou_3d(const Box3D & a, const Box3D & b)
{
  const double z_lo = std::max(a.cz - 0.5 * a.h, b.cz - 0.5 * b.h);
  const double z_hi = std::min(a.cz + 0.5 * a.h, b.cz + 0.5 * b.h);
  const double z_overlap = std::max(0.0, z_hi - z_lo);
  const double inter = z_overlap > 0.0 ? bev_intersection_area(a, b) * z_overlap : 0.0;
  const double uni = a.volume() + b.volume() - inter;
  if (!(uni > 0.0)) {
    return 0.0;
  }
  return std::clamp(inter / uni, 0.0, 1.0);
}

std::pair<PointCloud, std::vector<Box3D>> apply_global_transform(
  PointCloud points, std::vector<Box3D> boxes, const GlobalTransform & transform)
{
  const simd::KernelTable & k = simd::active();
  switch (transform.kind) {
    case GlobalTransform::Kind::Flip:
      k.scale(points.y(), -1.0);
      for (Box3D & b : boxes) {
        b.cy = -b.cy;
        b.yaw = -b.yaw;
      }
      break;
    case GlobalTransform::Kind::Scale: {
      const double s = transform.value;
      if (!(s > 0.0) || !std::isfinite(s)) {
        throw std::invalid_argument("scale factor must be positive and finite");
      }
      k.scale(points.x(), s);
      k.scale(points.y(), s);
      k.scale(points.z(), s);
      for (Box3D & b : boxes) {
        b.cx *= s;
        b.cy *= s;
        b.cz *= s;
        b.l *= s;
        b.w *= s;
        b.h *= s;
      }
      break;
    }
    case GlobalTransform::Kind::RotateZ: {
      const double c = std::cos(transform.value);
      const double s = std::sin(transform.value);
      k.rotate_z(points.x(), points.y(), c, s);
      for (Box3D & b : boxes) {
        const double x = b.cx;
        const double y = b.cy;
        b.cx = c * x - s * y;
        b.cy = s * x + c * y;
        b.yaw += transform.value;
      }
      break;
    }
  }
  return {std::move(points), std::move(boxes)};
}

}  // namespace cascade3d
