// Copyright 2026 The skelcst Authors.
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

/// \file metrics.hpp
/// \brief Object Keypoint Similarity and COCO-style keypoint AP/AR.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "skelcst/types.hpp"

namespace skelcst {

/// Per-keypoint falloff constants of the COCO keypoint evaluation, in
/// COCO keypoint order.
inline constexpr std::array<double, 17> kCocoSigmas = {
    0.026, 0.025, 0.025, 0.035, 0.035, 0.079, 0.079, 0.072, 0.072,
    0.062, 0.062, 0.107, 0.107, 0.087, 0.087, 0.089, 0.089};

/// Mean over labeled ground-truth keypoints of exp(-d^2 / (2 area (2 sigma)^2)).
/// Throws InvalidArgument when `gt` has no labeled keypoint, `gt_area` is not
/// positive, or the sizes disagree.
double oks(const Pose& pred, const Pose& gt, double gt_area,
           std::span<const double> sigmas = kCocoSigmas);

struct Prediction {
  std::int64_t image_id = 0;
  Pose pose;
  double score = 0.0;
};

struct GroundTruth {
  std::int64_t image_id = 0;
  Pose pose;
  double area = 0.0;
};

struct EvalResult {
  double ap = 0.0;
  double ap50 = 0.0;
  double ap75 = 0.0;
  double ap_medium = 0.0;
  double ap_large = 0.0;
  double ar50 = 0.0;
  /// AP at each threshold, all areas.
  std::vector<double> ap_per_threshold;
  std::vector<double> thresholds;
};

/// 0.50, 0.55, ..., 0.95
std::vector<double> default_oks_thresholds();

struct AreaRange {
  double lo = 0.0;
  double hi = 1e10;
};

inline constexpr AreaRange kAreaAll{0.0, 1e10};
inline constexpr AreaRange kAreaMedium{32.0 * 32.0, 96.0 * 96.0};
inline constexpr AreaRange kAreaLarge{96.0 * 96.0, 1e10};

/// AP at one OKS threshold restricted to an area band, with 101-point
/// interpolation. Also returns the final recall through `recall` when given.
double average_precision(const std::vector<Prediction>& preds, const std::vector<GroundTruth>& gts,
                         double threshold, AreaRange range, double* recall = nullptr,
                         std::span<const double> sigmas = kCocoSigmas);

/// Greedy per-image matching in descending score order, integrated over the
/// given thresholds. Ground truths without any labeled keypoint are ignored.
/// Bands with no ground truth report 0.
EvalResult evaluate(const std::vector<Prediction>& preds, const std::vector<GroundTruth>& gts,
                    std::vector<double> thresholds = default_oks_thresholds(),
                    std::span<const double> sigmas = kCocoSigmas);

}  // namespace skelcst
