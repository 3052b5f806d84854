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

// Compiled with -mavx2 (and without -mfma); only reached after a CPUID check.

#include "kernels_impl.hpp"

#include <immintrin.h>

#include <algorithm>
#include <bit>

namespace cascade3d::simd::detail
{
namespace
{

constexpr std::size_t kLanes = 4;

inline __m256d abs_pd(__m256d v)
{
  return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v);
}

template <class T>
std::span<T> tail(std::span<T> s, std::size_t from)
{
  return s.subspan(from);
}

}  // namespace

void to_local_avx2(
  std::span<const double> x, std::span<const double> y, std::span<const double> z,
  const ZFrame & f, std::span<double> lx, std::span<double> ly, std::span<double> lz)
{
  const std::size_t n = x.size();
  const std::size_t vec_end = n - n % kLanes;
  const __m256d ox = _mm256_set1_pd(f.ox);
  const __m256d oy = _mm256_set1_pd(f.oy);
  const __m256d oz = _mm256_set1_pd(f.oz);
  const __m256d c = _mm256_set1_pd(f.cos_yaw);
  const __m256d s = _mm256_set1_pd(f.sin_yaw);
  for (std::size_t i = 0; i < vec_end; i += kLanes) {
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(&x[i]), ox);
    const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(&y[i]), oy);
    const __m256d dz = _mm256_sub_pd(_mm256_loadu_pd(&z[i]), oz);
    const __m256d a = _mm256_mul_pd(c, dx);
    const __m256d b = _mm256_mul_pd(s, dy);
    const __m256d e = _mm256_mul_pd(s, dx);
    const __m256d d = _mm256_mul_pd(c, dy);
    _mm256_storeu_pd(&lx[i], _mm256_add_pd(a, b));
    _mm256_storeu_pd(&ly[i], _mm256_sub_pd(d, e));
    _mm256_storeu_pd(&lz[i], dz);
  }
  to_local_scalar(
    tail(x, vec_end), tail(y, vec_end), tail(z, vec_end), f, tail(lx, vec_end),
    tail(ly, vec_end), tail(lz, vec_end));
}

void rotate_z_avx2(std::span<double> x, std::span<double> y, double cos_t, double sin_t)
{
  const std::size_t n = x.size();
  const std::size_t vec_end = n - n % kLanes;
  const __m256d c = _mm256_set1_pd(cos_t);
  const __m256d s = _mm256_set1_pd(sin_t);
  for (std::size_t i = 0; i < vec_end; i += kLanes) {
    const __m256d xi = _mm256_loadu_pd(&x[i]);
    const __m256d yi = _mm256_loadu_pd(&y[i]);
    const __m256d a = _mm256_mul_pd(c, xi);
    const __m256d b = _mm256_mul_pd(s, yi);
    const __m256d e = _mm256_mul_pd(s, xi);
    const __m256d d = _mm256_mul_pd(c, yi);
    _mm256_storeu_pd(&x[i], _mm256_sub_pd(a, b));
    _mm256_storeu_pd(&y[i], _mm256_add_pd(e, d));
  }
  rotate_z_scalar(tail(x, vec_end), tail(y, vec_end), cos_t, sin_t);
}

void scale_avx2(std::span<double> v, double s)
{
  const std::size_t n = v.size();
  const std::size_t vec_end = n - n % kLanes;
  const __m256d sv = _mm256_set1_pd(s);
  for (std::size_t i = 0; i < vec_end; i += kLanes) {
    _mm256_storeu_pd(&v[i], _mm256_mul_pd(_mm256_loadu_pd(&v[i]), sv));
  }
  scale_scalar(tail(v, vec_end), s);
}

std::size_t in_box_mask_avx2(
  std::span<const double> x, std::span<const double> y, std::span<const double> z,
  const ZFrame & f, const HalfExtents & half, std::span<std::uint8_t> mask)
{
  const std::size_t n = x.size();
  const std::size_t vec_end = n - n % kLanes;
  const __m256d ox = _mm256_set1_pd(f.ox);
  const __m256d oy = _mm256_set1_pd(f.oy);
  const __m256d oz = _mm256_set1_pd(f.oz);
  const __m256d c = _mm256_set1_pd(f.cos_yaw);
  const __m256d s = _mm256_set1_pd(f.sin_yaw);
  const __m256d hx = _mm256_set1_pd(half.hx + half.tolerance);
  const __m256d hy = _mm256_set1_pd(half.hy + half.tolerance);
  const __m256d hz = _mm256_set1_pd(half.hz + half.tolerance);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < vec_end; i += kLanes) {
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(&x[i]), ox);
    const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(&y[i]), oy);
    const __m256d dz = _mm256_sub_pd(_mm256_loadu_pd(&z[i]), oz);
    const __m256d lx = _mm256_add_pd(_mm256_mul_pd(c, dx), _mm256_mul_pd(s, dy));
    const __m256d ly = _mm256_sub_pd(_mm256_mul_pd(c, dy), _mm256_mul_pd(s, dx));
    __m256d inside = _mm256_cmp_pd(abs_pd(lx), hx, _CMP_LE_OQ);
    inside = _mm256_and_pd(inside, _mm256_cmp_pd(abs_pd(ly), hy, _CMP_LE_OQ));
    inside = _mm256_and_pd(inside, _mm256_cmp_pd(abs_pd(dz), hz, _CMP_LE_OQ));
    const unsigned bits = static_cast<unsigned>(_mm256_movemask_pd(inside));
    for (std::size_t k = 0; k < kLanes; ++k) {
      mask[i + k] = static_cast<std::uint8_t>((bits >> k) & 1u);
    }
    hits += static_cast<std::size_t>(std::popcount(bits));
  }
  return hits + in_box_mask_scalar(
                  tail(x, vec_end), tail(y, vec_end), tail(z, vec_end), f, half,
                  tail(mask, vec_end));
}

Bounds3 bounds_avx2(
  std::span<const double> x, std::span<const double> y, std::span<const double> z)
{
  const std::size_t n = x.size();
  if (n < kLanes) {
    return bounds_scalar(x, y, z);
  }
  const std::size_t vec_end = n - n % kLanes;
  __m256d mn[3] = {_mm256_loadu_pd(&x[0]), _mm256_loadu_pd(&y[0]), _mm256_loadu_pd(&z[0])};
  __m256d mx[3] = {mn[0], mn[1], mn[2]};
  const double * cols[3] = {x.data(), y.data(), z.data()};
  for (std::size_t i = kLanes; i < vec_end; i += kLanes) {
    for (int a = 0; a < 3; ++a) {
      const __m256d v = _mm256_loadu_pd(cols[a] + i);
      mn[a] = _mm256_min_pd(v, mn[a]);
      mx[a] = _mm256_max_pd(v, mx[a]);
    }
  }
  Bounds3 b{};
  for (int a = 0; a < 3; ++a) {
    alignas(32) double lo[kLanes];
    alignas(32) double hi[kLanes];
    _mm256_store_pd(lo, mn[a]);
    _mm256_store_pd(hi, mx[a]);
    b.min[a] = lo[0];
    b.max[a] = hi[0];
    for (std::size_t k = 1; k < kLanes; ++k) {
      b.min[a] = std::min(b.min[a], lo[k]);
      b.max[a] = std::max(b.max[a], hi[k]);
    }
    for (std::size_t i = vec_end; i < n; ++i) {
      b.min[a] = std::min(b.min[a], cols[a][i]);
      b.max[a] = std::max(b.max[a], cols[a][i]);
    }
  }
  return b;
}

std::size_t quantize_avx2(
  std::span<const double> x, std::span<const double> y, std::span<const double> z,
  const QuantGrid & g, std::span<std::int32_t> ix, std::span<std::int32_t> iy,
  std::span<std::int32_t> iz)
{
  const std::size_t n = x.size();
  const std::size_t vec_end = n - n % kLanes;
  const double * cols[3] = {x.data(), y.data(), z.data()};
  std::int32_t * outs[3] = {ix.data(), iy.data(), iz.data()};
  __m256d origin[3];
  __m256d upper[3];
  __m256d size[3];
  __m128i last[3];
  for (int a = 0; a < 3; ++a) {
    origin[a] = _mm256_set1_pd(g.origin[a]);
    upper[a] = _mm256_set1_pd(g.upper[a]);
    size[a] = _mm256_set1_pd(g.size[a]);
    last[a] = _mm_set1_epi32(g.dims[a] - 1);
  }
  const __m128i invalid = _mm_set1_epi32(-1);
  std::size_t kept = 0;
  for (std::size_t i = 0; i < vec_end; i += kLanes) {
    __m256d valid = _mm256_castsi256_pd(_mm256_set1_epi64x(-1));
    __m128i cell[3];
    for (int a = 0; a < 3; ++a) {
      const __m256d p = _mm256_loadu_pd(cols[a] + i);
      valid = _mm256_and_pd(valid, _mm256_cmp_pd(p, origin[a], _CMP_GE_OQ));
      valid = _mm256_and_pd(valid, _mm256_cmp_pd(p, upper[a], _CMP_LT_OQ));
      const __m256d q = _mm256_floor_pd(_mm256_div_pd(_mm256_sub_pd(p, origin[a]), size[a]));
      cell[a] = _mm_min_epi32(_mm256_cvttpd_epi32(q), last[a]);
    }
    const int bits = _mm256_movemask_pd(valid);
    // Narrow the 64-bit lane mask to 32-bit lanes.
    const __m128i keep = _mm_set_epi32(
      (bits & 8) ? -1 : 0, (bits & 4) ? -1 : 0, (bits & 2) ? -1 : 0, (bits & 1) ? -1 : 0);
    for (int a = 0; a < 3; ++a) {
      const __m128i out = _mm_blendv_epi8(invalid, cell[a], keep);
      _mm_storeu_si128(reinterpret_cast<__m128i *>(outs[a] + i), out);
    }
    kept += static_cast<std::size_t>(std::popcount(static_cast<unsigned>(bits)));
  }
  return kept + quantize_scalar(
                  tail(x, vec_end), tail(y, vec_end), tail(z, vec_end), g, tail(ix, vec_end),
                  tail(iy, vec_end), tail(iz, vec_end));
}

}  // namespace cascade3d::simd::detail
