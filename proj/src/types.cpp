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

#include "skelcst/types.hpp"

#include <algorithm>

namespace skelcst {

std::size_t Pose::num_labeled() const {
  return static_cast<std::size_t>(
      std::count_if(joints.begin(), joints.end(), [](const Joint& j) { return j.labeled(); }));
}

Pose make_visible_pose(const std::vector<Point2>& points) {
  Pose pose(points.size());
  for (std::size_t k = 0; k < points.size(); ++k) {
    pose[k] = Joint{points[k], Visibility::kLabeledVisible, 1.0};
  }
  return pose;
}

void validate_pose(const Pose& pose) {
  for (std::size_t k = 0; k < pose.size(); ++k) {
    const Joint& j = pose[k];
    if (j.labeled() && !is_finite(j.position)) {
      throw InvalidArgument("keypoint " + std::to_string(k) + " is labeled but not finite");
    }
    if (!(j.confidence >= 0.0 && j.confidence <= 1.0)) {
      throw InvalidArgument("keypoint " + std::to_string(k) + " confidence outside [0, 1]");
    }
  }
}

}  // namespace skelcst
