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

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "test_support.hpp"

namespace skelcst {
namespace {

std::string mirror_name(const std::string& name) {
  if (name.rfind("left_", 0) == 0) return "right_" + name.substr(5);
  if (name.rfind("right_", 0) == 0) return "left_" + name.substr(6);
  return name;
}

TEST(CocoSkeleton, HasSeventeenKeypointsAndNineteenEdges) {
  const SkeletonTopology t = build_coco_skeleton();
  EXPECT_EQ(t.num_keypoints(), 17u);
  EXPECT_EQ(t.num_edges(), 19u);
  EXPECT_NO_THROW(validate_topology(t));
}

TEST(CocoSkeleton, ContainsEyeToEyeEdge) {
  const SkeletonTopology t = build_coco_skeleton();
  EXPECT_NO_THROW(t.edge_index(t.keypoint_index("left_eye"), t.keypoint_index("right_eye")));
}

// Mirror every edge by swapping left/right names and check the declared
// symmetric pairs are exactly the mirror classes of size two.
TEST(CocoSkeleton, SymmetricPairsMatchMirrorClosure) {
  const SkeletonTopology t = build_coco_skeleton();
  std::size_t self_symmetric = 0;
  std::vector<std::pair<std::size_t, std::size_t>> expected;
  for (std::size_t i = 0; i < t.num_edges(); ++i) {
    const std::size_t a = t.keypoint_index(mirror_name(t.keypoint_names[t.edges[i].from]));
    const std::size_t b = t.keypoint_index(mirror_name(t.keypoint_names[t.edges[i].to]));
    const std::size_t j = t.edge_index(a, b);
    if (j == i) {
      ++self_symmetric;
    } else if (i < j) {
      expected.emplace_back(i, j);
    }
  }
  EXPECT_EQ(self_symmetric, 3u);
  EXPECT_EQ(expected.size(), 8u);
  EXPECT_EQ(2 * expected.size() + self_symmetric, t.num_edges());

  auto declared = t.symmetric_pairs;
  for (auto& p : declared) p = std::minmax(p.first, p.second);
  std::sort(declared.begin(), declared.end());
  EXPECT_EQ(declared, expected);
}

TEST(ValidateTopology, RejectsMalformedGraphs) {
  SkeletonTopology t = testing::single_edge_topology();
  EXPECT_NO_THROW(validate_topology(t));

  auto loop = t;
  loop.edges = {{1, 1}};
  EXPECT_THROW(validate_topology(loop), InvalidArgument);

  auto range = t;
  range.edges = {{0, 2}};
  EXPECT_THROW(validate_topology(range), InvalidArgument);

  auto dup = t;
  dup.edges = {{0, 1}, {1, 0}};
  EXPECT_THROW(validate_topology(dup), InvalidArgument);

  auto coco = build_coco_skeleton();
  coco.symmetric_pairs.push_back({0, 4});  // edge 0 already paired
  EXPECT_THROW(validate_topology(coco), InvalidArgument);

  auto self_pair = build_coco_skeleton();
  self_pair.symmetric_pairs = {{4, 4}};
  EXPECT_THROW(validate_topology(self_pair), InvalidArgument);
}

TEST(AveragePose, IdenticalPosesGiveThatPoseNormalized) {
  const Pose p = testing::placed_template(40.0, {100.0, 120.0});
  const Pose avg = compute_average_pose({p, p});
  const Pose expected = synthetic_template_pose();  // already torso-normalized
  for (std::size_t k = 0; k < avg.size(); ++k) {
    EXPECT_NEAR(avg[k].position.x, expected[k].position.x, 1e-12);
    EXPECT_NEAR(avg[k].position.y, expected[k].position.y, 1e-12);
    EXPECT_EQ(avg[k].visibility, Visibility::kLabeledVisible);
  }
}

TEST(AveragePose, SinglePoseWithoutNormalizationIsItself) {
  const Pose p = testing::placed_template(40.0, {100.0, 120.0});
  const Pose avg = compute_average_pose({p}, AverageNormalization::kNone);
  for (std::size_t k = 0; k < avg.size(); ++k) EXPECT_EQ(avg[k].position, p[k].position);
}

TEST(AveragePose, ErrorsWithoutUsableData) {
  EXPECT_THROW(compute_average_pose({}), InsufficientData);
  Pose partial = testing::placed_template(40.0, {100.0, 120.0});
  partial[3].visibility = Visibility::kNotLabeled;
  EXPECT_THROW(compute_average_pose({partial}), InsufficientData);
}

TEST(AveragePose, SkipsPartiallyLabeledInstances) {
  const Pose full = testing::placed_template(40.0, {100.0, 120.0});
  Pose partial = testing::placed_template(10.0, {0.0, 0.0});
  partial[16].position = {500.0, 500.0};
  partial[16].visibility = Visibility::kNotLabeled;
  const Pose a = compute_average_pose({full});
  const Pose b = compute_average_pose({full, partial});
  EXPECT_EQ(a, b);
}

TEST(AveragePose, InvariantUnderInputPermutation) {
  std::mt19937_64 rng(11);
  std::vector<Pose> poses;
  for (int i = 0; i < 12; ++i) {
    poses.push_back(testing::perturbed(testing::placed_template(30.0 + i, {80.0, 90.0}), rng, 2.0));
  }
  const Pose ref = compute_average_pose(poses);
  for (int trial = 0; trial < 20; ++trial) {
    std::shuffle(poses.begin(), poses.end(), rng);
    const Pose avg = compute_average_pose(poses);
    for (std::size_t k = 0; k < avg.size(); ++k) {
      EXPECT_NEAR(avg[k].position.x, ref[k].position.x, 1e-12);
      EXPECT_NEAR(avg[k].position.y, ref[k].position.y, 1e-12);
    }
  }
}

TEST(EdgeWeights, UniformSchemeIsAllOnes) {
  const auto t = build_coco_skeleton();
  const EdgeWeights w = compute_edge_weights(synthetic_template_pose(), t, WeightScheme::kUniform);
  ASSERT_EQ(w.lambdas.size(), 19u);
  for (double l : w.lambdas) EXPECT_EQ(l, 1.0);
}

TEST(EdgeWeights, LongestEdgeNormalizesItself) {
  const auto t = build_coco_skeleton();
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const Pose avg = testing::perturbed(synthetic_template_pose(), rng, 0.05);
    const auto prop = raw_edge_weights(avg, t, WeightScheme::kProportionalLength);
    const auto inv = raw_edge_weights(avg, t, WeightScheme::kInverseLength);
    const auto longest = std::max_element(prop.begin(), prop.end()) - prop.begin();
    EXPECT_EQ(prop[longest], 1.0);
    EXPECT_EQ(inv[longest], 0.0);
    for (std::size_t i = 0; i < prop.size(); ++i) {
      EXPECT_GT(prop[i], 0.0);
      EXPECT_LE(prop[i], 1.0);
      EXPECT_NEAR(prop[i] + inv[i], 1.0, 1e-15);
    }
  }
}

TEST(EdgeWeights, SymmetricPairsAreEqualAfterAveraging) {
  const auto t = build_coco_skeleton();
  std::mt19937_64 rng(9);
  for (auto scheme : {WeightScheme::kUniform, WeightScheme::kInverseLength,
                      WeightScheme::kProportionalLength}) {
    for (int trial = 0; trial < 20; ++trial) {
      const Pose avg = testing::perturbed(synthetic_template_pose(), rng, 0.1);
      const EdgeWeights w = compute_edge_weights(avg, t, scheme);
      for (const auto& [a, b] : t.symmetric_pairs) EXPECT_EQ(w.lambdas[a], w.lambdas[b]);
    }
  }
}

TEST(EdgeWeights, RatioSchemesIgnoreUniformScaling) {
  const auto t = build_coco_skeleton();
  std::mt19937_64 rng(3);
  std::vector<Pose> poses;
  for (int i = 0; i < 6; ++i) {
    poses.push_back(testing::perturbed(testing::placed_template(40.0, {90.0, 100.0}), rng, 1.5));
  }
  for (auto norm : {AverageNormalization::kTorso, AverageNormalization::kNone}) {
    std::vector<Pose> scaled = poses;
    for (Pose& p : scaled) {
      for (Joint& j : p.joints) j.position *= 3.5;
    }
    for (auto scheme : {WeightScheme::kInverseLength, WeightScheme::kProportionalLength}) {
      const auto a = compute_edge_weights(compute_average_pose(poses, norm), t, scheme);
      const auto b = compute_edge_weights(compute_average_pose(scaled, norm), t, scheme);
      for (std::size_t i = 0; i < a.lambdas.size(); ++i) {
        EXPECT_NEAR(a.lambdas[i], b.lambdas[i], 1e-12);
      }
    }
  }
}

TEST(EdgeWeights, ZeroLengthEdgeIsAnError) {
  const auto t = build_coco_skeleton();
  Pose avg = synthetic_template_pose();
  avg[2].position = avg[1].position;  // eyes coincide
  EXPECT_THROW(compute_edge_weights(avg, t, WeightScheme::kProportionalLength), InvalidArgument);
}

TEST(WeightSchemeNames, ParseBothForms) {
  EXPECT_EQ(parse_weight_scheme("1"), WeightScheme::kUniform);
  EXPECT_EQ(parse_weight_scheme("inverse_length"), WeightScheme::kInverseLength);
  EXPECT_EQ(parse_weight_scheme("3"), WeightScheme::kProportionalLength);
  EXPECT_THROW(parse_weight_scheme("4"), InvalidArgument);
}

}  // namespace
}  // namespace skelcst
