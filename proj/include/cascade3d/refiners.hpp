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

// Synthetic refiners that stand in for trained detection heads.

#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "cascade3d/cascade.hpp"

namespace cascade3d::cascade
{

/// Returns the proposal unchanged with a fixed confidence.
class IdentityRefiner : public Refiner
{
public:
  explicit IdentityRefiner(double confidence = 0.7);

  Refinement refine(const Box3D & proposal, const Scene & scene, int stage, std::uint64_t seed)
    const override;
  std::string describe() const override;

private:
  double confidence_;
};

/// Index of the ground truth a proposal refines towards: highest 3D IoU,
/// or the nearest center when nothing overlaps. nullopt without ground truth.
std::optional<std::size_t> refinement_target(const Box3D & proposal, std::span<const Box3D> gts);

struct ContractionOptions
{
  /// Fraction of the way each box parameter moves towards its target.
  double lambda = 0.5;
  /// Gaussian noise added after the move: center (m, per axis), extents (m)
  /// and yaw (rad).
  double center_sigma = 0.0;
  double extent_sigma = 0.0;
  double yaw_sigma = 0.0;
  /// Confidence = 3D IoU of the refined box with its target when true,
  /// otherwise `constant_confidence`.
  bool confidence_from_iou = true;
  double constant_confidence = 1.0;
};

/// Moves a proposal a fraction lambda towards its target ground truth,
/// optionally with Gaussian jitter.
class ContractionRefiner : public Refiner
{
public:
  explicit ContractionRefiner(ContractionOptions options);

  Refinement refine(const Box3D & proposal, const Scene & scene, int stage, std::uint64_t seed)
    const override;
  std::string describe() const override;

  const ContractionOptions & options() const { return options_; }

private:
  ContractionOptions options_;
};

/// Wraps another refiner and replaces its confidence with the 3D IoU of the
/// refined box against the best-overlapping ground truth.
class IouScoredRefiner : public Refiner
{
public:
  explicit IouScoredRefiner(std::shared_ptr<const Refiner> inner);

  Refinement refine(const Box3D & proposal, const Scene & scene, int stage, std::uint64_t seed)
    const override;
  bool concurrent() const override { return inner_->concurrent(); }
  std::string describe() const override;

private:
  std::shared_ptr<const Refiner> inner_;
};

/// Center noise of the "jitter" preset, in meters. Small enough that one and
/// three stages land within 0.01 IoU of each other from input IoU 0.9 on a
/// car-sized box.
inline constexpr double kDefaultJitterSigma = 0.05;

/// Builds "identity", "contraction" or "jitter" (contraction plus Gaussian
/// center jitter of `sigma`, defaulting to kDefaultJitterSigma).
std::shared_ptr<const Refiner> make_refiner(
  std::string_view name, double lambda = 0.5, std::optional<double> sigma = std::nullopt);

}  // namespace cascade3d::cascade
