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

// Data-parallel inner loops over columnar point arrays.
//
// Every kernel has a scalar reference implementation and, on x86-64, an AVX2
// variant. The AVX2 variants use the same operation order as the scalar code
// (separate multiply and add, no FMA contraction, true division), so the two
// produce bit-identical results; tests/simd_equivalence_test.cpp checks this.
// The active variant is chosen once at startup from CPUID and can be forced
// with the CASCADE3D_SIMD environment variable ("scalar", "avx2", "auto").

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace cascade3d::simd
{

enum class Isa { Scalar, Avx2 };

std::string_view isa_name(Isa isa);

/// Rigid frame given by a translation and a rotation about Z
/// (cos_yaw, sin_yaw). to_local maps p to R_z(-yaw) * (p - origin).
struct ZFrame
{
  double ox = 0.0;
  double oy = 0.0;
  double oz = 0.0;
  double cos_yaw = 1.0;
  double sin_yaw = 0.0;
};

/// Per-axis half extents with a tolerance for inclusive boundary tests.
struct HalfExtents
{
  double hx = 0.0;
  double hy = 0.0;
  double hz = 0.0;
  double tolerance = 0.0;
};

struct Bounds3
{
  double min[3];
  double max[3];
};

/// Axis-aligned quantization grid: cell = floor((p - origin) / size), valid
/// for origin <= p < upper and clamped to dims - 1.
struct QuantGrid
{
  double origin[3];
  double upper[3];
  double size[3];
  std::int32_t dims[3];
};

/// Function table for one instruction set. All spans of one call must have
/// equal length; outputs may not alias inputs unless stated.
struct KernelTable
{
  Isa isa;

  void (*to_local)(
    std::span<const double> x, std::span<const double> y, std::span<const double> z,
    const ZFrame & frame, std::span<double> lx, std::span<double> ly, std::span<double> lz);

  /// In place: (x, y) <- (c*x - s*y, s*x + c*y).
  void (*rotate_z)(std::span<double> x, std::span<double> y, double cos_t, double sin_t);

  /// In place: v <- v * s.
  void (*scale)(std::span<double> v, double s);

  /// mask[i] = 1 iff the point, taken to the box frame, satisfies
  /// |local| <= half + tolerance on every axis. Returns the number of hits.
  std::size_t (*in_box_mask)(
    std::span<const double> x, std::span<const double> y, std::span<const double> z,
    const ZFrame & frame, const HalfExtents & half, std::span<std::uint8_t> mask);

  /// Per-axis min/max; n must be > 0.
  Bounds3 (*bounds)(
    std::span<const double> x, std::span<const double> y, std::span<const double> z);

  /// Writes per-axis cell indices, or -1 in ix for dropped points. Returns
  /// the number of kept points.
  std::size_t (*quantize)(
    std::span<const double> x, std::span<const double> y, std::span<const double> z,
    const QuantGrid & grid, std::span<std::int32_t> ix, std::span<std::int32_t> iy,
    std::span<std::int32_t> iz);
};

const KernelTable & scalar_kernels();

/// Null when the build has no AVX2 variant or the CPU lacks AVX2.
const KernelTable * avx2_kernels();

/// The table all library code dispatches through.
const KernelTable & active();

/// Overrides the dispatch choice. Intended for tests and benchmarks; not
/// safe to call while other threads run kernels. Returns false (and leaves
/// the selection unchanged) if the requested ISA is unavailable.
bool select(Isa isa);

}  // namespace cascade3d::simd
