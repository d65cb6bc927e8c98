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

/// \file loss.hpp
/// \brief Skeleton structure loss (edge length + edge direction) with its
/// analytic gradient, Gaussian heatmap targets, and the heatmap MSE.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "skelcst/heatmap.hpp"
#include "skelcst/topology.hpp"
#include "skelcst/types.hpp"

namespace skelcst {

/// Predicted or ground-truth edges shorter than this have no defined
/// direction; their angle term is 0 and contributes no gradient.
inline constexpr double kDegenerateEdgeLength = 1e-6;

/// Which parts of the structure loss to evaluate. Both on is the full loss.
struct ConstraintTerms {
  bool length = true;
  bool angle = true;
};

struct LossValue {
  double total = 0.0;
  double length_term = 0.0;
  double angle_term = 0.0;
  /// dL/d(pred keypoint), one entry per keypoint.
  std::vector<Point2> grad;
  /// Number of edges whose ground-truth endpoints were both labeled.
  std::size_t active_edges = 0;
};

/// Sum over active edges of `lambda * |e_pred - e_gt|^2 + (1 - cos(theta))`.
/// An edge is active when both of its ground-truth endpoints are labeled.
/// Throws InvalidArgument if the weights, poses and topology disagree in size
/// or a predicted coordinate on an active edge is not finite.
LossValue constraint_loss(const Pose& pred, const Pose& gt, const EdgeWeights& weights,
                          const SkeletonTopology& topology, ConstraintTerms terms = {});

struct GradientCheck {
  double max_error = 0.0;
  /// Flattened coordinate index (2k for x, 2k+1 for y) of the worst entry.
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
};

/// Compares `analytic` with central differences of `f` around `x`. The error
/// per coordinate is relative to |analytic|, or absolute where |analytic| < 1e-8.
GradientCheck check_gradient(const std::function<double(std::span<const double>)>& f,
                             std::span<const double> x, std::span<const double> analytic,
                             double h);

/// Central-difference check of constraint_loss over every predicted coordinate.
/// Returns the maximum relative error.
double constraint_loss_grad_check(const Pose& pred, const Pose& gt, const EdgeWeights& weights,
                                  const SkeletonTopology& topology, double h,
                                  ConstraintTerms terms = {});

std::vector<double> flatten_positions(const Pose& pose);
void unflatten_positions(std::span<const double> flat, Pose& pose);

struct HeatmapTarget {
  Heatmap heatmap;
  double sigma = 0.0;
  /// Labeled keypoints whose centre lies outside the grid. Their channels
  /// are still rendered around the off-grid centre.
  std::vector<std::size_t> off_grid_keypoints;
};

/// Channel k holds `exp(-d^2 / (2 sigma^2))` around labeled keypoint k and is
/// zero for unlabeled keypoints. Throws InvalidArgument for an empty grid or
/// non-positive sigma.
HeatmapTarget render_gaussian_target(const Pose& gt, std::size_t width, std::size_t height,
                                     double sigma);

/// Mean squared difference over all cells. Throws InvalidArgument on shape mismatch.
double heatmap_mse(const Heatmap& pred, const Heatmap& target);

/// Total training objective: the original (heatmap) loss plus the structure loss.
double combined_loss(double original, double cst);

}  // namespace skelcst
