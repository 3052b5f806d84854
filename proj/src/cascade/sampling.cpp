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

#include "cascade3d/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "cascade3d/cascade.hpp"
#include "cascade3d/geometry.hpp"

namespace cascade3d::cascade
{
namespace
{

// Partial Fisher-Yates with an explicit uniform draw so the result does not
// depend on the standard library's shuffle.
std::vector<std::size_t> draw(std::vector<std::size_t> pool, std::size_t k, std::mt19937_64 & rng)
{
  k = std::min(k, pool.size());
  for (std::size_t i = 0; i < k; ++i) {
    const std::uint64_t span = pool.size() - i;
    const std::size_t j = i + static_cast<std::size_t>(rng() % span);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace

RoiSample sample_rois(
  std::span<const Box3D> proposals, std::span<const Box3D> gts, std::size_t count,
  double fg_iou, std::uint64_t seed)
{
  if (count == 0) {
    throw std::invalid_argument("RoI sample count must be positive");
  }
  const std::size_t n = proposals.size();
  std::vector<double> best(n, 0.0);
  std::vector<int> match(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t g = 0; g < gts.size(); ++g) {
      const double iou = iou_3d(proposals[i], gts[g]);
      if (iou > best[i]) {
        best[i] = iou;
        match[i] = static_cast<int>(g);
      }
    }
  }
  std::vector<std::size_t> pos;
  std::vector<std::size_t> neg;
  for (std::size_t i = 0; i < n; ++i) {
    (match[i] >= 0 && best[i] >= fg_iou ? pos : neg).push_back(i);
  }
  std::size_t n_fg = std::min(pos.size(), count / 2);
  const std::size_t n_bg = std::min(neg.size(), count - n_fg);
  n_fg = std::min(pos.size(), count - n_bg);

  std::mt19937_64 rng(seed);
  const std::vector<std::size_t> fg = draw(std::move(pos), n_fg, rng);
  const std::vector<std::size_t> bg = draw(std::move(neg), n_bg, rng);

  RoiSample out;
  for (std::size_t i : fg) {
    out.indices.push_back(i);
    out.positive.push_back(true);
    out.matched_gt.push_back(match[i]);
    out.max_iou.push_back(best[i]);
  }
  for (std::size_t i : bg) {
    out.indices.push_back(i);
    out.positive.push_back(false);
    out.matched_gt.push_back(-1);
    out.max_iou.push_back(best[i]);
  }
  return out;
}

std::vector<Box3D> gen_proposals_at_iou(
  const Box3D & gt, double target_iou, std::size_t n, std::uint64_t seed, double tolerance)
{
  if (!(target_iou > 0.0 && target_iou <= 1.0)) {
    throw std::invalid_argument("target IoU must lie in (0, 1]");
  }
  if (gt.degenerate()) {
    throw std::invalid_argument("degenerate ground-truth box");
  }
  std::vector<Box3D> out;
  out.reserve(n);
  if (target_iou == 1.0) {
    out.assign(n, gt);
    return out;
  }
  const double t_max = std::sqrt(gt.l * gt.l + gt.w * gt.w + gt.h * gt.h);
  std::normal_distribution<double> unit(0.0, 1.0);
  for (std::size_t k = 0; k < n; ++k) {
    std::mt19937_64 rng(mix_seed(seed, k));
    double dx = 0.0, dy = 0.0, dz = 0.0, norm = 0.0;
    while (norm < 1e-12) {
      dx = unit(rng);
      dy = unit(rng);
      dz = unit(rng);
      norm = std::sqrt(dx * dx + dy * dy + dz * dz);
    }
    dx /= norm;
    dy /= norm;
    dz /= norm;
    const auto shifted = [&](double t) {
      Box3D b = gt;
      b.cx += t * dx;
      b.cy += t * dy;
      b.cz += t * dz;
      return b;
    };
    double lo = 0.0;
    double hi = t_max;
    for (int step = 0; step < 64; ++step) {
      const double mid = 0.5 * (lo + hi);
      if (iou_3d(shifted(mid), gt) > target_iou) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    const Box3D b = shifted(0.5 * (lo + hi));
    const double got = iou_3d(b, gt);
    if (std::abs(got - target_iou) > tolerance) {
      char msg[128];
      std::snprintf(msg, sizeof(msg), "IoU %.4f unreachable: bisection ended at %.4f", target_iou, got);
      throw UnreachableIouError(msg);
    }
    out.push_back(b);
  }
  return out;
}

}  // namespace cascade3d::cascade
