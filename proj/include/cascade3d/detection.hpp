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

#include <string>

#include "cascade3d/box.hpp"

namespace cascade3d
{

/// A scored box in the LiDAR frame.
struct DetectionRecord
{
  std::string frame_id;
  Box3D box;
  std::string class_name;
  double score = 0.0;
};

}  // namespace cascade3d
