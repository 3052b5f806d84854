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
#include <span>
#include <utility>
#include <vector>

#include "cascade3d/box.hpp"
#include "cascade3d/point_cloud.hpp"

namespace cascade3d
{

/// Points within this distance (m) outside a box face still count as inside.
inline constexpr double kContainmentTolerance = 1e-9;
/// On-edge classification tolerance for polygon clipping (m).
inline constexpr double kClipEpsilon = 1e-9;
/// Clipped areas below this (m^2) are treated as zero.
inline constexpr double kSliverArea = 1e-12;

struct Point2
{
  double x = 0.0;
  double y = 0.0;
};

/// Convex polygon with counter-clockwise vertices.
struct BevPolygon
{
  std::vector<Point2> vertices;

  /// Shoelace area; non-negative for counter-clockwise input.
  double area() const;
};

/// The four BEV corners of a box, counter-clockwise.
std::array<Point2, 4> bev_corners(const Box3D & box);

/// The eight corners of a box in world coordinates.
std::array<std::array<double, 3>, 8> corners(const Box3D & box);

/// Clips convex polygon `subject` against convex polygon `clip`
/// (Sutherland-Hodgman). Both must be counter-clockwise.
BevPolygon clip_convex(std::span<const Point2> subject, std::span<const Point2> clip);

PointCloud to_local_frame(const Box3D & box, const PointCloud & points);

/// Indices of the points inside `box` (faces inclusive), ascending.
std::vector<std::size_t> points_in_box(const Box3D & box, const PointCloud & points);

/// Smallest box with the yaw of `box` enclosing `points` (all assumed inside
/// `box`). The result is clamped so that it never exceeds `box`. An empty set
/// yields a zero-extent box at the center of `box`.
Box3D smallest_enclosing_aligned_box(const Box3D & box, const PointCloud & points);

double bev_intersection_area(const Box3D & a, const Box3D & b);
double iou_bev(const Box3D & a, const Box3D & b);
double iou_3d(const Box3D & a, const Box3D & b);

/// One global augmentation applied jointly to a cloud and its boxes.
struct GlobalTransform
{
  enum class Kind { Flip, Scale, RotateZ };

  Kind kind = Kind::Flip;
  double value = 0.0;

  /// Mirror across the XZ-plane: y -> -y, yaw -> -yaw.
  static GlobalTransform flip() { return {Kind::Flip, 0.0}; }
  static GlobalTransform scale(double s) { return {Kind::Scale, s}; }
  static GlobalTransform rotate_z(double theta) { return {Kind::RotateZ, theta}; }
};

std::pair<PointCloud, std::vector<Box3D>> apply_global_transform(
  PointCloud points, std::vector<Box3D> boxes, const GlobalTransform & transform);

}  // namespace cascade3d
