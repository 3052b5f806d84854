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
#include <limits>
#include <span>
#include <vector>

#include "cascade3d/detection.hpp"

namespace cascade3d
{

/// Greedy rotated-box NMS on BEV IoU. A detection is dropped when its BEV
/// IoU with an already kept detection of the same frame and class exceeds
/// `iou_threshold`. Equal scores are ordered by box parameters, so the
/// result depends only on the input multiset. Output is score-descending
/// with at most `max_keep` entries.
std::vector<DetectionRecord> nms_rotated(
  std::span<const DetectionRecord> dets, double iou_threshold,
  std::size_t max_keep = std::numeric_limits<std::size_t>::max());

}  // namespace cascade3d
