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

#include "skelcst/topology.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace skelcst {

std::size_t SkeletonTopology::keypoint_index(const std::string& name) const {
  auto it = std::find(keypoint_names.begin(), keypoint_names.end(), name);
  if (it == keypoint_names.end()) {
    throw InvalidArgument("unknown keypoint '" + name + "'");
  }
  return static_cast<std::size_t>(it - keypoint_names.begin());
}

std::size_t SkeletonTopology::edge_index(std::size_t a, std::size_t b) const {
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if ((edges[i].from == a && edges[i].to == b) || (edges[i].from == b && edges[i].to == a)) {
      return i;
    }
  }
  throw InvalidArgument("no edge between keypoints " + std::to_string(a) + " and " +
                        std::to_string(b));
}

void validate_topology(const SkeletonTopology& topology) {
  const std::size_t k = topology.num_keypoints();
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (std::size_t i = 0; i < topology.edges.size(); ++i) {
    const Edge& e = topology.edges[i];
    if (e.from >= k || e.to >= k) {
      throw InvalidArgument("edge " + std::to_string(i) + " references a keypoint out of range");
    }
    if (e.from == e.to) {
      throw InvalidArgument("edge " + std::to_string(i) + " is a self-loop");
    }
    if (!seen.insert(std::minmax(e.from, e.to)).second) {
      throw InvalidArgument("edge " + std::to_string(i) + " duplicates an earlier edge");
    }
  }
  std::vector<int> uses(topology.edges.size(), 0);
  for (const auto& [a, b] : topology.symmetric_pairs) {
    if (a >= uses.size() || b >= uses.size()) {
      throw InvalidArgument("symmetric pair references an edge out of range");
    }
    if (a == b) {
      throw InvalidArgument("symmetric pair must join two distinct edges");
    }
    if (++uses[a] > 1 || ++uses[b] > 1) {
      throw InvalidArgument("edge appears in more than one symmetric pair");
    }
  }
}

SkeletonTopology build_coco_skeleton() {
  SkeletonTopology t;
  t.keypoint_names = {"nose",       "left_eye",       "right_eye",      "left_ear",
                      "right_ear",  "left_shoulder",  "right_shoulder", "left_elbow",
                      "right_elbow", "left_wrist",    "right_wrist",    "left_hip",
                      "right_hip",  "left_knee",      "right_knee",     "left_ankle",
                      "right_ankle"};
  // COCO person category skeleton, converted to 0-based indices.
  t.edges = {{15, 13}, {13, 11}, {16, 14}, {14, 12}, {11, 12}, {5, 11}, {6, 12},
             {5, 6},   {5, 7},   {6, 8},   {7, 9},   {8, 10},  {1, 2},  {0, 1},
             {0, 2},   {1, 3},   {2, 4},   {3, 5},   {4, 6}};
  t.symmetric_pairs = {{0, 2}, {1, 3}, {5, 6}, {8, 9}, {10, 11}, {13, 14}, {15, 16}, {17, 18}};
  return t;
}

WeightScheme parse_weight_scheme(const std::string& text) {
  if (text == "1" || text == "uniform") return WeightScheme::kUniform;
  if (text == "2" || text == "inverse_length") return WeightScheme::kInverseLength;
  if (text == "3" || text == "proportional_length") return WeightScheme::kProportionalLength;
  throw InvalidArgument("unknown weight scheme '" + text + "'");
}

std::string to_string(WeightScheme scheme) {
  switch (scheme) {
    case WeightScheme::kUniform:
      return "uniform";
    case WeightScheme::kInverseLength:
      return "inverse_length";
    case WeightScheme::kProportionalLength:
      return "proportional_length";
  }
  return "unknown";
}

int scheme_number(WeightScheme scheme) {
  switch (scheme) {
    case WeightScheme::kUniform:
      return 1;
    case WeightScheme::kInverseLength:
      return 2;
    case WeightScheme::kProportionalLength:
      return 3;
  }
  return 0;
}

namespace {

Point2 midpoint(const Pose& pose, std::size_t a, std::size_t b) {
  return 0.5 * (pose[a].position + pose[b].position);
}

}  // namespace

Pose compute_average_pose(const std::vector<Pose>& annotations,
                          AverageNormalization normalization,
                          const SkeletonTopology& topology) {
  if (annotations.empty()) {
    throw InsufficientData("average pose requested from an empty annotation list");
  }
  const std::size_t k = topology.num_keypoints();
  std::size_t ls = 0, rs = 0, lh = 0, rh = 0;
  if (normalization == AverageNormalization::kTorso) {
    ls = topology.keypoint_index("left_shoulder");
    rs = topology.keypoint_index("right_shoulder");
    lh = topology.keypoint_index("left_hip");
    rh = topology.keypoint_index("right_hip");
  }

  std::vector<Point2> sum(k);
  std::size_t used = 0;
  for (const Pose& pose : annotations) {
    if (pose.size() != k || !pose.fully_labeled()) continue;
    Point2 origin{};
    double scale = 1.0;
    if (normalization == AverageNormalization::kTorso) {
      origin = midpoint(pose, lh, rh);
      const double torso = norm(midpoint(pose, ls, rs) - origin);
      if (!(torso > 0.0) || !std::isfinite(torso)) continue;
      scale = 1.0 / torso;
    }
    for (std::size_t j = 0; j < k; ++j) {
      sum[j] += (pose[j].position - origin) * scale;
    }
    ++used;
  }
  if (used == 0) {
    throw InsufficientData("no fully labeled instance available for the average pose");
  }

  Pose avg(k);
  for (std::size_t j = 0; j < k; ++j) {
    avg[j] = Joint{sum[j] * (1.0 / static_cast<double>(used)), Visibility::kLabeledVisible, 1.0};
  }
  return avg;
}

std::vector<double> raw_edge_weights(const Pose& avg_pose, const SkeletonTopology& topology,
                                     WeightScheme scheme) {
  if (avg_pose.size() != topology.num_keypoints()) {
    throw InvalidArgument("average pose keypoint count does not match the topology");
  }
  if (!avg_pose.fully_labeled()) {
    throw InvalidArgument("average pose must be fully labeled");
  }
  std::vector<double> lengths;
  lengths.reserve(topology.num_edges());
  for (std::size_t i = 0; i < topology.num_edges(); ++i) {
    const Edge& e = topology.edges[i];
    const double len = norm(avg_pose[e.from].position - avg_pose[e.to].position);
    if (!(len > 0.0)) {
      throw InvalidArgument("edge " + std::to_string(i) + " has zero length in the average pose");
    }
    lengths.push_back(len);
  }
  const double longest = lengths.empty() ? 1.0 : *std::max_element(lengths.begin(), lengths.end());

  std::vector<double> lambdas(lengths.size());
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    switch (scheme) {
      case WeightScheme::kUniform:
        lambdas[i] = 1.0;
        break;
      case WeightScheme::kInverseLength:
        lambdas[i] = 1.0 - lengths[i] / longest;
        break;
      case WeightScheme::kProportionalLength:
        lambdas[i] = lengths[i] / longest;
        break;
    }
  }
  return lambdas;
}

void average_symmetric_pairs(std::vector<double>& lambdas, const SkeletonTopology& topology) {
  for (const auto& [a, b] : topology.symmetric_pairs) {
    const double mean = 0.5 * (lambdas[a] + lambdas[b]);
    lambdas[a] = mean;
    lambdas[b] = mean;
  }
}

EdgeWeights compute_edge_weights(const Pose& avg_pose, const SkeletonTopology& topology,
                                 WeightScheme scheme) {
  EdgeWeights w{scheme, raw_edge_weights(avg_pose, topology, scheme)};
  average_symmetric_pairs(w.lambdas, topology);
  return w;
}

Pose synthetic_template_pose() {
  // Front-facing, arms hanging. x to the subject's left, y downwards, hip
  // midpoint at the origin, torso length 1.
  return make_visible_pose({
      {0.00, -1.45},   // nose
      {0.06, -1.52},   // left_eye
      {-0.06, -1.52},  // right_eye
      {0.14, -1.48},   // left_ear
      {-0.14, -1.48},  // right_ear
      {0.38, -1.00},   // left_shoulder
      {-0.38, -1.00},  // right_shoulder
      {0.48, -0.50},   // left_elbow
      {-0.48, -0.50},  // right_elbow
      {0.52, -0.05},   // left_wrist
      {-0.52, -0.05},  // right_wrist
      {0.20, 0.00},    // left_hip
      {-0.20, 0.00},   // right_hip
      {0.22, 0.75},    // left_knee
      {-0.22, 0.75},   // right_knee
      {0.22, 1.45},    // left_ankle
      {-0.22, 1.45},   // right_ankle
  });
}

}  // namespace skelcst
