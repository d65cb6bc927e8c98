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

#include <cstddef>
#include <cstdint>
#include <vector>

#include "skelcst/types.hpp"

namespace skelcst {

/// w x h x K scalar grid stored channel-major, then row-major:
/// `data[(k * height + y) * width + x]`.
class Heatmap {
 public:
  Heatmap() = default;
  Heatmap(std::size_t width, std::size_t height, std::size_t channels, float fill = 0.0f)
      : width_(width), height_(height), channels_(channels),
        data_(width * height * channels, fill) {}

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  std::size_t channels() const { return channels_; }
  std::size_t channel_size() const { return width_ * height_; }

  float& at(std::size_t k, std::size_t y, std::size_t x) {
    return data_[(k * height_ + y) * width_ + x];
  }
  float at(std::size_t k, std::size_t y, std::size_t x) const {
    return data_[(k * height_ + y) * width_ + x];
  }

  const float* channel(std::size_t k) const { return data_.data() + k * channel_size(); }
  float* channel(std::size_t k) { return data_.data() + k * channel_size(); }

  std::vector<float>& data() { return data_; }
  const std::vector<float>& data() const { return data_; }

  bool same_shape(const Heatmap& o) const {
    return width_ == o.width_ && height_ == o.height_ && channels_ == o.channels_;
  }

  friend bool operator==(const Heatmap&, const Heatmap&) = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::size_t channels_ = 0;
  std::vector<float> data_;
};

}  // namespace skelcst
