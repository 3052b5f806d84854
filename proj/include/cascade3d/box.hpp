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
#include <cmath>
#include <numbers>

namespace cascade3d
{

/// Wraps an angle into (-pi, pi].
inline double normalize_angle(double angle)
{
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double a = std::fmod(angle, two_pi);
  if (a <= -std::numbers::pi) {
    a += two_pi;
  } else if (a > std::numbers::pi) {
    a -= two_pi;
  }
  return a;
}

/// Oriented 3D box in a right-handed frame with Z up.
///
/// (cx, cy, cz) is the geometric center, (l, w, h) the extents along the
/// box-local X, Y and Z axes, and yaw the rotation about world Z. Yaw is kept
/// as given; call canonical() when a value in (-pi, pi] is required.
struct Box3D
{
  double cx = 0.0;
  double cy = 0.0;
  double cz = 0.0;
  double l = 0.0;
  double w = 0.0;
  double h = 0.0;
  double yaw = 0.0;

  double volume() const { return l * w * h; }
  double bev_area() const { return l * w; }

  /// True when any extent is zero (or negative), e.g. the enclosure of an
  /// empty or single-point set.
  bool degenerate() const { return !(l > 0.0 && w > 0.0 && h > 0.0); }

  Box3D canonical() const
  {
    Box3D b = *this;
    b.yaw = normalize_angle(yaw);
    return b;
  }

  std::array<double, 7> as_array() const { return {cx, cy, cz, l, w, h, yaw}; }

  static Box3D from_array(const std::array<double, 7> & v)
  {
    return {v[0], v[1], v[2], v[3], v[4], v[5], v[6]};
  }

  friend bool operator==(const Box3D &, const Box3D &) = default;
};

}  // namespace cascade3d
