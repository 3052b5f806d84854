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

#include <cstddef>
#include <span>
#include <vector>

namespace cascade3d
{

/// Columnar point set (structure of arrays) in the sensor frame.
///
/// Coordinates are stored in double precision so that rigid transforms of a
/// cloud and its boxes stay consistent to well below a nanometre.
class PointCloud
{
public:
  PointCloud() = default;

  std::size_t size() const { return x_.size(); }
  bool empty() const { return x_.empty(); }

  void reserve(std::size_t n)
  {
    x_.reserve(n);
    y_.reserve(n);
    z_.reserve(n);
    intensity_.reserve(n);
  }

  void resize(std::size_t n)
  {
    x_.resize(n);
    y_.resize(n);
    z_.resize(n);
    intensity_.resize(n);
  }

  void push_back(double x, double y, double z, double intensity = 0.0)
  {
    x_.push_back(x);
    y_.push_back(y);
    z_.push_back(z);
    intensity_.push_back(intensity);
  }

  std::span<const double> x() const { return x_; }
  std::span<const double> y() const { return y_; }
  std::span<const double> z() const { return z_; }
  std::span<const double> intensity() const { return intensity_; }

  std::span<double> x() { return x_; }
  std::span<double> y() { return y_; }
  std::span<double> z() { return z_; }
  std::span<double> intensity() { return intensity_; }

  /// Copy of the points at the given indices, in the given order.
  PointCloud select(std::span<const std::size_t> indices) const;

private:
  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> z_;
  std::vector<double> intensity_;
};

}  // namespace cascade3d
