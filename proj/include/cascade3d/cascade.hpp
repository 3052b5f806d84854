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

// Multi-stage proposal refinement. Stage t refines the boxes produced by
// stage t-1 (stage 0 being the input proposals); at the end the stage
// confidences are averaged and the last-stage box is the output.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cascade3d/box.hpp"
#include "cascade3d/detection.hpp"
#include "cascade3d/point_cloud.hpp"

namespace cascade3d::cascade
{

/// What a refiner may look at. Non-owning; must outlive the call.
struct Scene
{
  std::span<const Box3D> gt_boxes;
  const PointCloud * cloud = nullptr;
};

struct Refinement
{
  Box3D box;
  double confidence = 0.0;
};

/// One detection-head stage, abstracted: feature pooling plus the
/// confidence and regression branches. Implementations must be
/// deterministic in (proposal, scene, stage, seed), return a confidence in
/// [0, 1] and a box with positive extents.
class Refiner
{
public:
  virtual ~Refiner() = default;

  /// `stage` counts from 1.
  virtual Refinement refine(
    const Box3D & proposal, const Scene & scene, int stage, std::uint64_t seed) const = 0;

  /// Whether refine() may run on several threads at once.
  virtual bool concurrent() const { return true; }

  virtual std::string describe() const = 0;
};

/// Refinement history of one proposal.
struct StageTrace
{
  /// boxes[t - 1] and confidences[t - 1] are the stage-t outputs.
  std::vector<Box3D> boxes;
  std::vector<double> confidences;
  double fused_confidence = 0.0;
  Box3D final_box;
};

class CascadeError : public std::runtime_error
{
public:
  CascadeError(std::size_t proposal, int stage, const std::string & what);

  std::size_t proposal_index() const { return proposal_; }
  int stage() const { return stage_; }

private:
  std::size_t proposal_;
  int stage_;
};

/// SplitMix64 finalizer of (a, b); used to derive per-proposal and
/// per-stage random streams.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

/// Runs `stages` refinement passes over every proposal. Proposal i draws
/// its randomness from seed ^ i, so results do not depend on `threads`.
/// Throws CascadeError naming the first failing proposal.
std::vector<StageTrace> run_cascade(
  std::span<const Box3D> proposals, const Refiner & refiner, int stages, const Scene & scene,
  std::uint64_t seed = 0, unsigned threads = 1);

struct InferenceConfig
{
  double proposal_nms_iou = 0.7;
  std::size_t max_proposals = 100;
  double final_nms_iou = 0.1;
};

/// NMS over raw proposals, top-k into the cascade, score fusion, and a
/// final NMS.
std::vector<DetectionRecord> inference_pipeline(
  std::span<const DetectionRecord> raw_proposals, const Refiner & refiner, int stages,
  const Scene & scene, const InferenceConfig & config = {}, std::uint64_t seed = 0,
  unsigned threads = 1);

}  // namespace cascade3d::cascade
