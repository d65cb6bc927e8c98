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

/// \file io.hpp
/// \brief COCO annotation/result JSON, the SKHM heatmap container and the
/// key-value weights text format.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "skelcst/heatmap.hpp"
#include "skelcst/metrics.hpp"
#include "skelcst/topology.hpp"
#include "skelcst/types.hpp"

namespace skelcst {

/// Malformed or unreadable input. `offset` is the byte offset of a JSON
/// syntax error when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset = 0) : Error(what), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

struct ImageInfo {
  std::int64_t id = 0;
  std::int64_t width = 0;
  std::int64_t height = 0;
};

struct Instance {
  std::int64_t id = 0;
  std::int64_t image_id = 0;
  Pose pose;
  double area = 0.0;
  std::vector<double> bbox;  // x, y, w, h when present
};

struct AnnotationSet {
  std::vector<ImageInfo> images;
  std::vector<Instance> instances;

  std::vector<GroundTruth> ground_truths() const;
  std::vector<Pose> poses() const;
};

/// Person-category instances of a COCO keypoint annotation file, in file
/// order. Throws ParseError on malformed JSON (with byte offset), missing
/// sections, a keypoint array whose length is not 3K, a visibility flag
/// outside {0, 1, 2}, or an instance on an unknown image.
AnnotationSet parse_coco_annotations(const std::string& json_text,
                                     std::size_t num_keypoints = kCocoNumKeypoints);
AnnotationSet load_coco_annotations(const std::filesystem::path& path,
                                    std::size_t num_keypoints = kCocoNumKeypoints);

/// COCO results list: {image_id, category_id, keypoints[3K], score}, where
/// the third keypoint value is the joint confidence. A "visibility" array is
/// written alongside so poses round-trip exactly.
std::string format_results(const std::vector<Prediction>& results, std::int64_t category_id = 1);
std::vector<Prediction> parse_results(const std::string& json_text);
void save_results(const std::filesystem::path& path, const std::vector<Prediction>& results,
                  std::int64_t category_id = 1);
std::vector<Prediction> load_results(const std::filesystem::path& path);

class HeatmapFormatError : public Error {
 public:
  enum class Kind { kOpenFailed, kBadMagic, kBadVersion, kTruncated, kTrailingData };
  HeatmapFormatError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

inline constexpr std::uint16_t kHeatmapFormatVersion = 1;

/// "SKHM", u16 version, u32 width, height, channels, then float32 values in
/// channel-major, row-major order. All little-endian.
std::vector<std::uint8_t> encode_heatmap(const Heatmap& hm);
Heatmap decode_heatmap(const std::vector<std::uint8_t>& bytes);
void write_heatmap(const std::filesystem::path& path, const Heatmap& hm);
Heatmap read_heatmap(const std::filesystem::path& path);

/// Key-value text: `key = value` per line, `#` comments.
std::string format_weights(const SkeletonTopology& topology, const EdgeWeights& weights);
void parse_weights(const std::string& text, SkeletonTopology& topology, EdgeWeights& weights);
void save_weights(const std::filesystem::path& path, const SkeletonTopology& topology,
                  const EdgeWeights& weights);
void load_weights(const std::filesystem::path& path, SkeletonTopology& topology,
                  EdgeWeights& weights);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace skelcst
