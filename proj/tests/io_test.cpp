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

#include "skelcst/io.hpp"

#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <random>

#include "test_support.hpp"

namespace skelcst {
namespace {

std::string keypoint_list(std::size_t k, int v) {
  std::string s;
  for (std::size_t i = 0; i < k; ++i) {
    if (i) s += ",";
    s += std::to_string(10 + i) + "," + std::to_string(20 + i) + "," + std::to_string(v);
  }
  return s;
}

std::string coco_file(const std::string& annotations) {
  return R"({"images":[{"id":7,"width":640,"height":480}],
            "categories":[{"id":1,"name":"person"},{"id":2,"name":"dog"}],
            "annotations":[)" +
         annotations + "]}";
}

std::string person(int id, const std::string& keypoints, int image = 7, int category = 1) {
  return R"({"id":)" + std::to_string(id) + R"(,"image_id":)" + std::to_string(image) +
         R"(,"category_id":)" + std::to_string(category) +
         R"(,"area":1234.5,"bbox":[1,2,30,40],"keypoints":[)" + keypoints + "]}";
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("skelcst_io_test_" + name);
}

TEST(CocoAnnotations, ParsesMinimalFile) {
  const AnnotationSet set = parse_coco_annotations(coco_file(person(3, keypoint_list(17, 2))));
  ASSERT_EQ(set.images.size(), 1u);
  EXPECT_EQ(set.images[0].width, 640);
  ASSERT_EQ(set.instances.size(), 1u);
  const Instance& inst = set.instances[0];
  EXPECT_EQ(inst.id, 3);
  EXPECT_EQ(inst.image_id, 7);
  EXPECT_EQ(inst.area, 1234.5);
  EXPECT_EQ(inst.bbox, (std::vector<double>{1, 2, 30, 40}));
  EXPECT_EQ(inst.pose[4].position, (Point2{14, 24}));
  EXPECT_EQ(inst.pose[4].visibility, Visibility::kLabeledVisible);
  EXPECT_EQ(inst.pose[4].confidence, 1.0);
  EXPECT_TRUE(inst.pose.fully_labeled());
  ASSERT_EQ(set.ground_truths().size(), 1u);
  EXPECT_EQ(set.ground_truths()[0].area, 1234.5);
}

TEST(CocoAnnotations, UnlabeledKeypointsKeepZeroConfidence) {
  const AnnotationSet set = parse_coco_annotations(coco_file(person(3, keypoint_list(17, 0))));
  EXPECT_EQ(set.instances[0].pose.num_labeled(), 0u);
  EXPECT_EQ(set.instances[0].pose[0].confidence, 0.0);
}

TEST(CocoAnnotations, NonPersonCategoriesAreSkipped) {
  const AnnotationSet set = parse_coco_annotations(
      coco_file(person(3, keypoint_list(17, 2)) + "," + person(4, keypoint_list(17, 2), 7, 2)));
  ASSERT_EQ(set.instances.size(), 1u);
  EXPECT_EQ(set.instances[0].id, 3);
}

TEST(CocoAnnotations, MalformedJsonReportsOffset) {
  try {
    parse_coco_annotations(R"({"images": [,]})");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 13u);
  }
}

TEST(CocoAnnotations, WrongKeypointCountNamesTheAnnotation) {
  try {
    parse_coco_annotations(coco_file(person(99, keypoint_list(16, 2))));
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("annotation 99"), std::string::npos) << e.what();
  }
}

TEST(CocoAnnotations, RejectsBadVisibilityAndUnknownImage) {
  EXPECT_THROW(parse_coco_annotations(coco_file(person(1, keypoint_list(17, 3)))), ParseError);
  EXPECT_THROW(parse_coco_annotations(coco_file(person(1, keypoint_list(17, 2), 8))), ParseError);
  EXPECT_THROW(parse_coco_annotations(R"({"images":[]})"), ParseError);
  EXPECT_THROW(load_coco_annotations(temp_path("does_not_exist.json")), ParseError);
}

TEST(Results, EmptyListRoundTrips) {
  EXPECT_TRUE(parse_results(format_results({})).empty());
}

TEST(Results, SinglePoseRoundTripsExactly) {
  Pose p = testing::placed_template(37.3, {101.7, 55.25});
  p[3].visibility = Visibility::kNotLabeled;
  p[3].confidence = 0.0;
  p[8].confidence = 0.123456789012345;
  const std::vector<Prediction> in = {{42, p, 0.87654321}};
  const auto out = parse_results(format_results(in));
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].image_id, 42);
  EXPECT_EQ(out[0].score, 0.87654321);
  EXPECT_EQ(out[0].pose, p);
}

TEST(Results, ManyRandomPosesRoundTripThroughAFile) {
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Prediction> in;
  for (int i = 0; i < 10000; ++i) {
    Pose p = testing::random_pose(rng, 17, -1000.0, 1000.0);
    for (Joint& j : p.joints) {
      j.confidence = u(rng);
      j.visibility = static_cast<Visibility>(rng() % 3);
    }
    in.push_back({static_cast<std::int64_t>(rng() % 5000), p, u(rng)});
  }
  const auto path = temp_path("results.json");
  save_results(path, in);
  const auto out = load_results(path);
  std::filesystem::remove(path);
  ASSERT_EQ(out.size(), in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    ASSERT_EQ(out[i].pose, in[i].pose) << i;
    ASSERT_EQ(out[i].score, in[i].score) << i;
    ASSERT_EQ(out[i].image_id, in[i].image_id) << i;
  }
}

TEST(Results, RejectsMixedCategoriesAndBadConfidence) {
  const std::string kp = "[" + keypoint_list(1, 1) + "]";
  const std::string a = R"({"image_id":1,"category_id":1,"score":0.5,"keypoints":)" + kp + "}";
  const std::string b = R"({"image_id":1,"category_id":2,"score":0.5,"keypoints":)" + kp + "}";
  EXPECT_EQ(parse_results("[" + a + "," + a + "]").size(), 2u);
  EXPECT_THROW(parse_results("[" + a + "," + b + "]"), ParseError);
  const std::string c = R"([{"image_id":1,"category_id":1,"score":0.5,"keypoints":[1,2,1.5]}])";
  EXPECT_THROW(parse_results(c), ParseError);
  const std::string d = R"([{"image_id":1,"category_id":1,"score":0.5,"keypoints":[1,2]}])";
  EXPECT_THROW(parse_results(d), ParseError);
}

TEST(Heatmap, SingleCellEncodesToTwentyTwoBytes) {
  Heatmap hm(1, 1, 1);
  hm.at(0, 0, 0) = 0.5f;
  const auto bytes = encode_heatmap(hm);
  const std::vector<std::uint8_t> expected = {'S', 'K', 'H', 'M', 1, 0, 1, 0, 0, 0, 1,
                                              0,   0,   0,   1,   0, 0, 0, 0, 0, 0, 0x3f};
  EXPECT_EQ(bytes, expected);
  EXPECT_EQ(decode_heatmap(bytes), hm);
}

TEST(Heatmap, DistinguishesFormatErrors) {
  using Kind = HeatmapFormatError::Kind;
  const auto good = encode_heatmap(Heatmap(3, 2, 2, 0.5f));
  auto kind_of = [](const std::vector<std::uint8_t>& b) {
    try {
      decode_heatmap(b);
    } catch (const HeatmapFormatError& e) {
      return e.kind();
    }
    ADD_FAILURE() << "decoded without error";
    return Kind::kOpenFailed;
  };
  for (std::size_t cut : {0u, 3u, 5u, 10u, 17u, 18u, 20u}) {
    EXPECT_EQ(kind_of({good.begin(), good.begin() + cut}), Kind::kTruncated) << cut;
  }
  EXPECT_EQ(kind_of({good.begin(), good.end() - 1}), Kind::kTruncated);
  auto magic = good;
  magic[0] = 'X';
  EXPECT_EQ(kind_of(magic), Kind::kBadMagic);
  auto version = good;
  version[4] = 2;
  EXPECT_EQ(kind_of(version), Kind::kBadVersion);
  auto trailing = good;
  trailing.push_back(0);
  EXPECT_EQ(kind_of(trailing), Kind::kTrailingData);
  try {
    read_heatmap(temp_path("missing.skhm"));
    FAIL();
  } catch (const HeatmapFormatError& e) {
    EXPECT_EQ(e.kind(), Kind::kOpenFailed);
  }
}

TEST(Heatmap, RandomGridRoundTripsBitExactly) {
  std::mt19937_64 rng(52);
  Heatmap hm = testing::random_heatmap(rng, 64, 48, 17);
  hm.data()[5] = -0.0f;
  hm.data()[6] = 1e-40f;  // subnormal
  const auto path = temp_path("grid.skhm");
  write_heatmap(path, hm);
  EXPECT_EQ(std::filesystem::file_size(path), 18u + 4u * 64u * 48u * 17u);
  const Heatmap back = read_heatmap(path);
  std::filesystem::remove(path);
  ASSERT_TRUE(back.same_shape(hm));
  EXPECT_EQ(std::memcmp(back.data().data(), hm.data().data(), 4 * hm.data().size()), 0);
}

TEST(Weights, RoundTripsExactly) {
  const SkeletonTopology t = build_coco_skeleton();
  const EdgeWeights w =
      compute_edge_weights(synthetic_template_pose(), t, WeightScheme::kInverseLength);
  const auto path = temp_path("weights.txt");
  save_weights(path, t, w);
  SkeletonTopology t2;
  EdgeWeights w2;
  load_weights(path, t2, w2);
  std::filesystem::remove(path);
  EXPECT_EQ(t2, t);
  EXPECT_EQ(w2, w);
}

TEST(Weights, RejectsMalformedInput) {
  const SkeletonTopology t = testing::single_edge_topology();
  const EdgeWeights w{WeightScheme::kUniform, {1.0}};
  const std::string good = format_weights(t, w);
  SkeletonTopology t2;
  EdgeWeights w2;
  EXPECT_NO_THROW(parse_weights(good, t2, w2));
  EXPECT_THROW(parse_weights(good + "extra = 1\n", t2, w2), ParseError);
  EXPECT_THROW(parse_weights(good + "lambdas = 1\n", t2, w2), ParseError);
  EXPECT_THROW(parse_weights("format = skelcst-weights-1\n", t2, w2), ParseError);
  std::string bad = good;
  bad.replace(bad.find("lambdas = 1"), 11, "lambdas = x");
  EXPECT_THROW(parse_weights(bad, t2, w2), ParseError);
  std::string count = good;
  count.replace(count.find("lambdas = 1"), 11, "lambdas = 1 1");
  EXPECT_THROW(parse_weights(count, t2, w2), ParseError);
  std::string edge = good;
  edge.replace(edge.find("edges = 0-1"), 11, "edges = 0-5");
  EXPECT_THROW(parse_weights(edge, t2, w2), ParseError);
  EXPECT_THROW(parse_weights("just text\n", t2, w2), ParseError);
}

}  // namespace
}  // namespace skelcst
