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

#include "cascade3d/cascade.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <optional>
#include <thread>

#include "cascade3d/nms.hpp"

namespace cascade3d::cascade
{
namespace
{

StageTrace trace_one(
  const Box3D & proposal, std::size_t index, const Refiner & refiner, int stages,
  const Scene & scene, std::uint64_t seed)
{
  StageTrace t;
  t.boxes.reserve(static_cast<std::size_t>(stages));
  t.confidences.reserve(static_cast<std::size_t>(stages));
  const std::uint64_t proposal_seed = seed ^ static_cast<std::uint64_t>(index);
  Box3D current = proposal;
  for (int stage = 1; stage <= stages; ++stage) {
    Refinement r;
    try {
      r = refiner.refine(current, scene, stage, mix_seed(proposal_seed, static_cast<std::uint64_t>(stage)));
    } catch (const std::exception & e) {
      throw CascadeError(index, stage, e.what());
    }
    if (!(r.confidence >= 0.0 && r.confidence <= 1.0)) {
      throw CascadeError(index, stage, "confidence outside [0, 1]");
    }
    if (r.box.degenerate() || !std::isfinite(r.box.volume())) {
      throw CascadeError(index, stage, "refined box has a non-positive extent");
    }
    t.boxes.push_back(r.box);
    t.confidences.push_back(r.confidence);
    current = r.box;
  }
  double sum = 0.0;
  for (double c : t.confidences) {
    sum += c;
  }
  t.fused_confidence = sum / static_cast<double>(stages);
  t.final_box = t.boxes.back();
  return t;
}

}  // namespace

CascadeError::CascadeError(std::size_t proposal, int stage, const std::string & what)
: std::runtime_error(
    "refiner failed on proposal " + std::to_string(proposal) + " at stage " +
    std::to_string(stage) + ": " + what),
  proposal_(proposal),
  stage_(stage)
{
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b)
{
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::vector<StageTrace> run_cascade(
  std::span<const Box3D> proposals, const Refiner & refiner, int stages, const Scene & scene,
  std::uint64_t seed, unsigned threads)
{
  if (stages < 1) {
    throw std::invalid_argument("cascade needs at least one stage");
  }
  const std::size_t n = proposals.size();
  std::vector<StageTrace> traces(n);
  const unsigned workers =
    refiner.concurrent() ? std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n))) : 1u;
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      traces[i] = trace_one(proposals[i], i, refiner, stages, scene, seed);
    }
    return traces;
  }

  // Contiguous chunks; the first failure by proposal index is reported.
  std::vector<std::optional<CascadeError>> failures(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t begin = n * w / workers;
      const std::size_t end = n * (w + 1) / workers;
      pool.emplace_back([&, w, begin, end] {
        for (std::size_t i = begin; i < end; ++i) {
          try {
            traces[i] = trace_one(proposals[i], i, refiner, stages, scene, seed);
          } catch (const CascadeError & e) {
            failures[w] = e;
            return;
          }
        }
      });
    }
  }
  for (const auto & f : failures) {
    if (f) {
      throw *f;
    }
  }
  return traces;
}

std::vector<DetectionRecord> inference_pipeline(
  std::span<const DetectionRecord> raw_proposals, const Refiner & refiner, int stages,
  const Scene & scene, const InferenceConfig & config, std::uint64_t seed, unsigned threads)
{
  const std::vector<DetectionRecord> kept =
    nms_rotated(raw_proposals, config.proposal_nms_iou, config.max_proposals);
  std::vector<Box3D> boxes;
  boxes.reserve(kept.size());
  for (const DetectionRecord & d : kept) {
    boxes.push_back(d.box);
  }
  const std::vector<StageTrace> traces = run_cascade(boxes, refiner, stages, scene, seed, threads);
  std::vector<DetectionRecord> refined;
  refined.reserve(kept.size());
  for (std::size_t i = 0; i < kept.size(); ++i) {
    refined.push_back(
      {kept[i].frame_id, traces[i].final_box, kept[i].class_name, traces[i].fused_confidence});
  }
  return nms_rotated(refined, config.final_nms_iou);
}

}  // namespace cascade3d::cascade
