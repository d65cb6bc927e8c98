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

/// \file decode.hpp
/// \brief Heatmap decoding: argmax with quarter-pixel refinement, soft-argmax,
/// Top-N peak extraction with square-window NMS, and associative-embedding
/// grouping of peaks into persons.

#include <cstddef>
#include <optional>
#include <vector>

#include "skelcst/heatmap.hpp"
#include "skelcst/types.hpp"

namespace skelcst {

struct ArgmaxOptions {
  /// Shift 0.25 px toward the larger neighbour along each axis.
  bool subpixel = true;
  /// Channels whose maximum is below this are flagged labeled_invisible.
  double score_floor = 0.1;
};

/// Per-channel global maximum. Ties resolve to the first cell in row-major order.
Pose decode_argmax(const Heatmap& hm, const ArgmaxOptions& options = {});

/// Per-channel expectation of cell coordinates under softmax(data / temperature).
/// Confidence is the channel maximum. Throws InvalidArgument if temperature <= 0.
Pose decode_soft_argmax(const Heatmap& hm, double temperature);

struct KeypointCandidate {
  std::size_t keypoint_type = 0;
  Point2 position;
  double score = 0.0;
  double tag = 0.0;
};

struct TopNOptions {
  std::size_t n = 30;
  /// Chebyshev radius: a candidate within this many cells of a kept,
  /// higher-scoring one is suppressed.
  std::size_t nms_radius = 2;
  double score_floor = 0.1;
  bool subpixel = false;
};

/// Up to `n` local maxima per channel (>= all 8 neighbours), in descending
/// score. Equal scores are ordered by row-major cell index.
std::vector<std::vector<KeypointCandidate>> decode_topn(const Heatmap& hm,
                                                        const TopNOptions& options);

/// As above, with each candidate's tag read from the same cell of `tags`.
std::vector<std::vector<KeypointCandidate>> decode_topn(const Heatmap& hm, const Heatmap& tags,
                                                        const TopNOptions& options);

struct PersonGroup {
  Pose pose;
  /// For every keypoint type, the index into that channel's candidate list,
  /// or nullopt when the person has no such joint.
  std::vector<std::optional<std::size_t>> members;
  double mean_tag = 0.0;
};

/// Shoulders, hips, elbows, wrists, knees, ankles, then the face.
std::vector<std::size_t> coco_grouping_order();

/// Greedy associative-embedding grouping. Channels are visited in `order`
/// (torso first for 17 channels, identity otherwise, when empty). Within a
/// channel, candidate/group pairs closer than `tag_threshold` in tag space
/// are matched by ascending distance (ties: higher score first); unmatched
/// candidates found new groups.
std::vector<PersonGroup> group_by_tags(
    const std::vector<std::vector<KeypointCandidate>>& candidates, double tag_threshold = 1.0,
    std::vector<std::size_t> order = {});

}  // namespace skelcst
