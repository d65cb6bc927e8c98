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

/// \file topology.hpp
/// \brief Skeleton graph, average pose and per-edge weights.

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "skelcst/types.hpp"

namespace skelcst {

/// Undirected edge between two keypoint indices. The edge vector is
/// `p[from] - p[to]`.
struct Edge {
  std::size_t from = 0;
  std::size_t to = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
};

struct SkeletonTopology {
  std::vector<std::string> keypoint_names;
  std::vector<Edge> edges;
  /// Left/right mirror pairs, as indices into `edges`. Edges that are their
  /// own mirror image (eye-eye, shoulder-shoulder, hip-hip) are not listed.
  std::vector<std::pair<std::size_t, std::size_t>> symmetric_pairs;

  std::size_t num_keypoints() const { return keypoint_names.size(); }
  std::size_t num_edges() const { return edges.size(); }

  /// Index of the named keypoint; throws InvalidArgument when absent.
  std::size_t keypoint_index(const std::string& name) const;
  /// Index of the edge joining `a` and `b` in either direction.
  std::size_t edge_index(std::size_t a, std::size_t b) const;

  friend bool operator==(const SkeletonTopology&, const SkeletonTopology&) = default;
};

/// Throws InvalidArgument when the graph has out-of-range indices,
/// self-loops, duplicate edges or malformed symmetric pairs.
void validate_topology(const SkeletonTopology& topology);

/// The 17-keypoint, 19-edge COCO person skeleton.
SkeletonTopology build_coco_skeleton();

constexpr std::size_t kCocoNumKeypoints = 17;

enum class WeightScheme {
  kUniform,             // scheme 1: every lambda = 1
  kInverseLength,       // scheme 2: 1 - |e| / max|e|
  kProportionalLength,  // scheme 3: |e| / max|e|
};

/// Parses "1"/"2"/"3" or the enum names ("uniform", ...).
WeightScheme parse_weight_scheme(const std::string& text);
std::string to_string(WeightScheme scheme);
int scheme_number(WeightScheme scheme);

struct EdgeWeights {
  WeightScheme scheme = WeightScheme::kUniform;
  std::vector<double> lambdas;
  friend bool operator==(const EdgeWeights&, const EdgeWeights&) = default;
};

enum class AverageNormalization {
  /// Hip midpoint at the origin, shoulder-midpoint to hip-midpoint length 1.
  kTorso,
  /// Raw pixel coordinates, no per-instance normalization.
  kNone,
};

/// Mean pose over the fully labeled instances of `annotations`. Instances
/// with a missing keypoint, or a degenerate torso under kTorso, are skipped.
/// Requires COCO keypoint naming when normalizing by the torso.
/// Throws InsufficientData when nothing usable remains.
Pose compute_average_pose(const std::vector<Pose>& annotations,
                          AverageNormalization normalization = AverageNormalization::kTorso,
                          const SkeletonTopology& topology = build_coco_skeleton());

/// Per-edge weights before mirror averaging.
std::vector<double> raw_edge_weights(const Pose& avg_pose, const SkeletonTopology& topology,
                                     WeightScheme scheme);

/// Per-edge weights with each symmetric pair replaced by the pair mean.
/// Throws InvalidArgument on a zero-length edge in `avg_pose`.
EdgeWeights compute_edge_weights(const Pose& avg_pose, const SkeletonTopology& topology,
                                 WeightScheme scheme);

/// Replaces each symmetric pair with its mean in place.
void average_symmetric_pairs(std::vector<double>& lambdas, const SkeletonTopology& topology);

/// Canonical upright template in torso units used by the synthetic
/// experiment when no annotation file is supplied. Not estimated from data.
Pose synthetic_template_pose();

}  // namespace skelcst
