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

#include "cascade3d/nms.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>

#include "cascade3d/geometry.hpp"

namespace cascade3d
{

std::vector<DetectionRecord> nms_rotated(
  std::span<const DetectionRecord> dets, double iou_threshold, std::size_t max_keep)
{
  if (!(iou_threshold > 0.0 && iou_threshold < 1.0)) {
    throw std::invalid_argument("NMS IoU threshold must lie in (0, 1)");
  }
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const DetectionRecord & x = dets[a];
    const DetectionRecord & y = dets[b];
    if (x.score != y.score) {
      return x.score > y.score;
    }
    if (x.frame_id != y.frame_id) {
      return x.frame_id < y.frame_id;
    }
    if (x.class_name != y.class_name) {
      return x.class_name < y.class_name;
    }
    return x.box.as_array() < y.box.as_array();
  });

  std::map<std::pair<std::string, std::string>, std::vector<Box3D>> kept_by_group;
  std::vector<DetectionRecord> out;
  for (std::size_t i : order) {
    if (out.size() >= max_keep) {
      break;
    }
    const DetectionRecord & d = dets[i];
    auto & kept = kept_by_group[{d.frame_id, d.class_name}];
    bool suppressed = false;
    for (const Box3D & k : kept) {
      if (iou_bev(d.box, k) > iou_threshold) {
        suppressed = true;
        break;
      }
    }
    if (!suppressed) {
      kept.push_back(d.box);
      out.push_back(d);
    }
  }
  return out;
}

}  // namespace cascade3d
