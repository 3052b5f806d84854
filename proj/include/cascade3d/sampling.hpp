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
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "cascade3d/box.hpp"

namespace cascade3d::cascade
{

struct RoiSample
{
  /// Indices into the proposal list; positives first.
  std::vector<std::size_t> indices;
  std::vector<bool> positive;
  /// Best-overlapping ground truth per sampled proposal, -1 for negatives.
  std::vector<int> matched_gt;
  std::vector<double> max_iou;

  std::size_t size() const { return indices.size(); }
};

/// Samples up to `count` proposals aiming for half positives (best 3D IoU
/// >= fg_iou), topping up from the other side when one runs short.
RoiSample sample_rois(
  std::span<const Box3D> proposals, std::span<const Box3D> gts, std::size_t count = 128,
  double fg_iou = 0.55, std::uint64_t seed = 0);

class UnreachableIouError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// `n` translated copies of `gt` whose 3D IoU with it is within
/// `tolerance` of `target_iou`. Each copy is shifted along a random
/// direction by a magnitude found by 64 bisection steps.
std::vector<Box3D> gen_proposals_at_iou(
  const Box3D & gt, double target_iou, std::size_t n, std::uint64_t seed,
  double tolerance = 0.02);

}  // namespace cascade3d::cascade
