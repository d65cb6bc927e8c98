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

/// \file refine.hpp
/// \brief Inference-time pose refinement: gradient descent on heatmap
/// evidence plus the skeleton structure loss against an aligned prior pose.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "skelcst/heatmap.hpp"
#include "skelcst/loss.hpp"
#include "skelcst/topology.hpp"
#include "skelcst/types.hpp"

namespace skelcst {

enum class PriorKind { kAveragePoseScaled, kNone };

struct RefineConfig {
  std::size_t steps = 500;
  double step_size = 0.2;
  double structure_weight = 1.0;
  PriorKind prior = PriorKind::kAveragePoseScaled;
  double convergence_tol = 1e-9;
  /// Joints of the initial pose at or above this confidence anchor the prior.
  double confidence_floor = 0.5;
  /// Start joints below confidence_floor at their aligned prior position.
  bool seed_unseen_from_prior = true;
  ConstraintTerms terms;
  /// Step halvings tried before a step is declared unproductive.
  std::size_t max_halvings = 20;
};

/// Throws InvalidArgument on out-of-range fields.
void validate_refine_config(const RefineConfig& cfg);

struct SimilarityTransform {
  double scale = 1.0;
  Point2 shift;
  Point2 apply(const Point2& p) const { return scale * p + shift; }
};

/// Least-squares translation + isotropic scale (no rotation) taking the
/// source joints onto the target joints with confidence >= floor.
/// Throws InsufficientData with fewer than two such joints.
SimilarityTransform fit_similarity(const Pose& source, const Pose& target, double confidence_floor);

/// `avg_pose` mapped through fit_similarity onto `target`.
Pose align_prior(const Pose& avg_pose, const Pose& target, double confidence_floor);

/// Bilinear sample of channel k at p, clamped to the grid, with its gradient.
/// The gradient is one-sided at cell boundaries and zero outside the grid.
double sample_bilinear(const Heatmap& hm, std::size_t k, const Point2& p, Point2* grad = nullptr);

struct ObjectiveValue {
  double value = 0.0;
  std::vector<Point2> grad;
};

/// Data term sum_k (1 - H_k(p_k)) plus `structure_weight` times the
/// structure loss of `p` against `prior`. A null prior or zero weight drops
/// the structure term.
ObjectiveValue refine_objective(const Pose& p, const Heatmap& hm, const Pose* prior,
                                const SkeletonTopology& topology, const EdgeWeights& weights,
                                const RefineConfig& cfg);

struct RefineResult {
  Pose pose;
  /// Objective at the start and after each accepted step.
  std::vector<double> trace;
  std::vector<std::string> warnings;
  std::size_t iterations = 0;
};

/// The prior is aligned once, to `init`, and held fixed during descent.
/// Joints of `init` below the confidence floor start at the prior when
/// `seed_unseen_from_prior` is set.
/// Each step tries `step_size` along the negative gradient and halves it
/// until the objective strictly decreases; the run ends after `steps`
/// accepted steps, when |delta| < convergence_tol, or when no halving helps.
RefineResult refine_pose(const Pose& init, const Heatmap& hm, const SkeletonTopology& topology,
                         const EdgeWeights& weights, const Pose& avg_pose, const RefineConfig& cfg);

}  // namespace skelcst
