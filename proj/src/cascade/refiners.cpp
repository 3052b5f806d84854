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

#include "cascade3d/refiners.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <stdexcept>

#include "cascade3d/geometry.hpp"

namespace cascade3d::cascade
{
namespace
{

constexpr double kMinExtent = 1e-3;

std::string fmt(const char * pattern, double a, double b = 0.0)
{
  char buf[128];
  std::snprintf(buf, sizeof(buf), pattern, a, b);
  return buf;
}

}  // namespace

IdentityRefiner::IdentityRefiner(double confidence)
: confidence_(confidence)
{
  if (!(confidence >= 0.0 && confidence <= 1.0)) {
    throw std::invalid_argument("identity refiner confidence must lie in [0, 1]");
  }
}

Refinement IdentityRefiner::refine(const Box3D & proposal, const Scene &, int, std::uint64_t) const
{
  return {proposal, confidence_};
}

std::string IdentityRefiner::describe() const
{
  return fmt("identity(confidence=%g)", confidence_);
}

std::optional<std::size_t> refinement_target(const Box3D & proposal, std::span<const Box3D> gts)
{
  if (gts.empty()) {
    return std::nullopt;
  }
  std::size_t best = 0;
  double best_iou = -1.0;
  for (std::size_t g = 0; g < gts.size(); ++g) {
    const double iou = iou_3d(proposal, gts[g]);
    if (iou > best_iou) {
      best_iou = iou;
      best = g;
    }
  }
  if (best_iou > 0.0) {
    return best;
  }
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t g = 0; g < gts.size(); ++g) {
    const double d = std::hypot(gts[g].cx - proposal.cx, gts[g].cy - proposal.cy, gts[g].cz - proposal.cz);
    if (d < best_d) {
      best_d = d;
      best = g;
    }
  }
  return best;
}

ContractionRefiner::ContractionRefiner(ContractionOptions options)
: options_(options)
{
  if (!(options.lambda > 0.0 && options.lambda <= 1.0)) {
    throw std::invalid_argument("contraction lambda must lie in (0, 1]");
  }
  if (options.center_sigma < 0.0 || options.extent_sigma < 0.0 || options.yaw_sigma < 0.0) {
    throw std::invalid_argument("jitter sigmas must be non-negative");
  }
  if (!(options.constant_confidence >= 0.0 && options.constant_confidence <= 1.0)) {
    throw std::invalid_argument("constant confidence must lie in [0, 1]");
  }
}

Refinement ContractionRefiner::refine(
  const Box3D & proposal, const Scene & scene, int, std::uint64_t seed) const
{
  const auto target = refinement_target(proposal, scene.gt_boxes);
  if (!target) {
    return {proposal, options_.confidence_from_iou ? 0.0 : options_.constant_confidence};
  }
  const Box3D & g = scene.gt_boxes[*target];
  const double lam = options_.lambda;
  Box3D r;
  r.cx = proposal.cx + lam * (g.cx - proposal.cx);
  r.cy = proposal.cy + lam * (g.cy - proposal.cy);
  r.cz = proposal.cz + lam * (g.cz - proposal.cz);
  r.l = proposal.l + lam * (g.l - proposal.l);
  r.w = proposal.w + lam * (g.w - proposal.w);
  r.h = proposal.h + lam * (g.h - proposal.h);
  r.yaw = proposal.yaw + lam * normalize_angle(g.yaw - proposal.yaw);

  if (options_.center_sigma > 0.0 || options_.extent_sigma > 0.0 || options_.yaw_sigma > 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> unit(0.0, 1.0);
    r.cx += options_.center_sigma * unit(rng);
    r.cy += options_.center_sigma * unit(rng);
    r.cz += options_.center_sigma * unit(rng);
    r.l = std::max(kMinExtent, r.l + options_.extent_sigma * unit(rng));
    r.w = std::max(kMinExtent, r.w + options_.extent_sigma * unit(rng));
    r.h = std::max(kMinExtent, r.h + options_.extent_sigma * unit(rng));
    r.yaw += options_.yaw_sigma * unit(rng);
  }
  const double confidence =
    options_.confidence_from_iou ? iou_3d(r, g) : options_.constant_confidence;
  return {r, confidence};
}

std::string ContractionRefiner::describe() const
{
  std::string s = fmt("contraction(lambda=%g", options_.lambda);
  if (options_.center_sigma > 0.0 || options_.extent_sigma > 0.0 || options_.yaw_sigma > 0.0) {
    s += fmt(",center_sigma=%g,extent_sigma=%g", options_.center_sigma, options_.extent_sigma);
    s += fmt(",yaw_sigma=%g", options_.yaw_sigma);
  }
  s += options_.confidence_from_iou ? ",confidence=iou)" : fmt(",confidence=%g)", options_.constant_confidence);
  return s;
}

IouScoredRefiner::IouScoredRefiner(std::shared_ptr<const Refiner> inner)
: inner_(std::move(inner))
{
  if (!inner_) {
    throw std::invalid_argument("IoU scorer needs an inner refiner");
  }
}

Refinement IouScoredRefiner::refine(
  const Box3D & proposal, const Scene & scene, int stage, std::uint64_t seed) const
{
  Refinement r = inner_->refine(proposal, scene, stage, seed);
  double best = 0.0;
  for (const Box3D & g : scene.gt_boxes) {
    best = std::max(best, iou_3d(r.box, g));
  }
  r.confidence = best;
  return r;
}

std::string IouScoredRefiner::describe() const
{
  return "iou-scored(" + inner_->describe() + ")";
}

std::shared_ptr<const Refiner> make_refiner(
  std::string_view name, double lambda, std::optional<double> sigma)
{
  if (name == "identity") {
    return std::make_shared<IdentityRefiner>();
  }
  ContractionOptions o;
  o.lambda = lambda;
  if (name == "contraction") {
    o.center_sigma = sigma.value_or(0.0);
    return std::make_shared<ContractionRefiner>(o);
  }
  if (name == "jitter") {
    o.center_sigma = sigma.value_or(kDefaultJitterSigma);
    return std::make_shared<ContractionRefiner>(o);
  }
  throw std::invalid_argument("unknown refiner: " + std::string(name));
}

}  // namespace cascade3d::cascade
