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

#include "cascade3d/simd/kernels.hpp"

namespace cascade3d::simd::detail
{

void to_local_scalar(
  std::span<const double> x, std::span<const double> y, std::span<const double> z,
  const ZFrame & f, std::span<double> lx, std::span<double> ly, std::span<double> lz);
void rotate_z_scalar(std::span<double> x, std::span<double> y, double c, double s);
void scale_scalar(std::span<double> v, double s);
std::size_t in_box_mask_scalar(
  std::span<const double> x, std::span<const double> y, std::span<const double> z,
  const ZFrame & f, const HalfExtents & half, std::span<std::uint8_t> mask);
Bounds3 bounds_scalar(
  std::span<const double> x, std::span<const double> y, std::span<const double> z);
std::size_t quantize_scalar(
  std::span<const double> x, std::span<const double> y, std::span<const double> z,
  const QuantGrid & g, std::span<std::int32_t> ix, std::span<std::int32_t> iy,
  std::span<std::int32_t> iz);

#if defined(CASCADE3D_HAVE_AVX2)
void to_local_avx2(
  std::span<const double> x, std::span<const double> y, std::span<const double> z,
  const ZFrame & f, std::span<double> lx, std::span<double> ly, std::span<double> lz);
void rotate_z_avx2(std::span<double> x, std::span<double> y, double c, double s);
void scale_avx2(std::span<double> v, double s);
std::size_t in_box_mask_avx2(
  std::span<const double> x, std::span<const double> y, std::span<const double> z,
  const ZFrame & f, const HalfExtents & half, std::span<std::uint8_t> mask);
Bounds3 bounds_avx2(
  std::span<const double> x, std::span<const double> y, std::span<const double> z);
std::size_t quantize_avx2(
  std::span<const double> x, std::span<const double> y, std::span<const double> z,
  const QuantGrid & g, std::span<std::int32_t> ix, std::span<std::int32_t> iy,
  std::span<std::int32_t> iz);
#endif

}  // namespace cascade3d::simd::detail
