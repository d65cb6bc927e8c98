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

/// \file types.hpp
/// \brief Core value types shared by every module: 2D points, joints, poses
/// and the library's exception hierarchy.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace skelcst {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Point2& operator+=(const Point2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr Point2& operator-=(const Point2& o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  constexpr Point2& operator*=(double s) {
    x *= s;
    y *= s;
    return *this;
  }
  friend constexpr Point2 operator+(Point2 a, const Point2& b) { return a += b; }
  friend constexpr Point2 operator-(Point2 a, const Point2& b) { return a -= b; }
  friend constexpr Point2 operator*(Point2 a, double s) { return a *= s; }
  friend constexpr Point2 operator*(double s, Point2 a) { return a *= s; }
  friend constexpr bool operator==(const Point2&, const Point2&) = default;
};

constexpr double dot(const Point2& a, const Point2& b) { return a.x * b.x + a.y * b.y; }
constexpr double squared_norm(const Point2& a) { return dot(a, a); }
inline double norm(const Point2& a) { return std::hypot(a.x, a.y); }
inline bool is_finite(const Point2& a) { return std::isfinite(a.x) && std::isfinite(a.y); }

/// COCO visibility flag. Numeric values match the annotation file encoding.
enum class Visibility : int {
  kNotLabeled = 0,
  kLabeledInvisible = 1,
  kLabeledVisible = 2,
};

struct Joint {
  Point2 position;
  Visibility visibility = Visibility::kNotLabeled;
  double confidence = 0.0;

  bool labeled() const { return visibility != Visibility::kNotLabeled; }
  friend bool operator==(const Joint&, const Joint&) = default;
};

/// One person's keypoints, indexed by keypoint type.
struct Pose {
  std::vector<Joint> joints;

  Pose() = default;
  explicit Pose(std::size_t num_keypoints) : joints(num_keypoints) {}

  std::size_t size() const { return joints.size(); }
  Joint& operator[](std::size_t k) { return joints[k]; }
  const Joint& operator[](std::size_t k) const { return joints[k]; }

  std::size_t num_labeled() const;
  bool fully_labeled() const { return num_labeled() == joints.size(); }

  friend bool operator==(const Pose&, const Pose&) = default;
};

/// Builds a pose whose joints are all labeled_visible with confidence 1.
Pose make_visible_pose(const std::vector<Point2>& points);

/// Throws InvalidArgument if a labeled joint is non-finite or a confidence
/// lies outside [0, 1].
void validate_pose(const Pose& pose);

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Not enough usable input to produce a result (e.g. empty annotation set).
class InsufficientData : public Error {
 public:
  using Error::Error;
};

}  // namespace skelcst
