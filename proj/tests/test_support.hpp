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

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <algorithm>

#include "skelcst/decode.hpp"
#include "skelcst/heatmap.hpp"
#include "skelcst/metrics.hpp"
#include "skelcst/topology.hpp"
#include "skelcst/types.hpp"

namespace skelcst::testing {

inline Pose random_pose(std::mt19937_64& rng, std::size_t k = kCocoNumKeypoints,
                        double lo = 0.0, double hi = 100.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Pose p(k);
  for (std::size_t j = 0; j < k; ++j) {
    p[j] = Joint{{u(rng), u(rng)}, Visibility::kLabeledVisible, 1.0};
  }
  return p;
}

/// `base` with every joint moved by N(0, sigma) per axis.
inline Pose perturbed(const Pose& base, std::mt19937_64& rng, double sigma) {
  std::normal_distribution<double> n(0.0, sigma);
  Pose p = base;
  for (Joint& j : p.joints) j.position += Point2{n(rng), n(rng)};
  return p;
}

/// Template skeleton scaled and shifted into pixel space.
inline Pose placed_template(double scale, Point2 shift) {
  Pose p = synthetic_template_pose();
  for (Joint& j : p.joints) j.position = scale * j.position + shift;
  return p;
}

/// Topology with a single edge 0 -> 1.
inline SkeletonTopology single_edge_topology() {
  SkeletonTopology t;
  t.keypoint_names = {"a", "b"};
  t.edges = {{0, 1}};
  return t;
}

/// Two-joint pose whose edge vector (p0 - p1) is `edge`.
inline Pose two_joint_pose(Point2 edge, Point2 base = {10.0, 10.0}) {
  return make_visible_pose({base + edge, base});
}

inline Heatmap random_heatmap(std::mt19937_64& rng, std::size_t w, std::size_t h, std::size_t k) {
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  Heatmap hm(w, h, k);
  for (float& v : hm.data()) v = u(rng);
  return hm;
}

/// Peaks of one channel by repeated selection: take the strongest remaining
/// local maximum (lowest row-major index on ties), then strike every
/// remaining peak within the Chebyshev radius of it.
inline std::vector<std::size_t> nms_oracle(const Heatmap& hm, std::size_t k, std::size_t n,
                                           std::size_t radius, double floor) {
  const auto w = static_cast<long>(hm.width());
  const auto h = static_cast<long>(hm.height());
  std::vector<std::size_t> remaining;
  for (long y = 0; y < h; ++y) {
    for (long x = 0; x < w; ++x) {
      const float v = hm.at(k, y, x);
      if (static_cast<double>(v) < floor) continue;
      bool peak = true;
      for (long dy = -1; dy <= 1 && peak; ++dy) {
        for (long dx = -1; dx <= 1; ++dx) {
          const long yy = y + dy;
          const long xx = x + dx;
          if (yy < 0 || yy >= h || xx < 0 || xx >= w) continue;
          if (hm.at(k, yy, xx) > v) {
            peak = false;
            break;
          }
        }
      }
      if (peak) remaining.push_back(static_cast<std::size_t>(y * w + x));
    }
  }
  const float* ch = hm.channel(k);
  std::vector<std::size_t> kept;
  while (!remaining.empty() && kept.size() < n) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < remaining.size(); ++i) {
      if (ch[remaining[i]] > ch[remaining[best]]) best = i;
    }
    const std::size_t pick = remaining[best];
    kept.push_back(pick);
    const long px = static_cast<long>(pick) % w;
    const long py = static_cast<long>(pick) / w;
    std::erase_if(remaining, [&](std::size_t o) {
      const long ox = static_cast<long>(o) % w;
      const long oy = static_cast<long>(o) / w;
      return std::max(std::abs(ox - px), std::abs(oy - py)) <= static_cast<long>(radius);
    });
  }
  return kept;
}

/// Candidates for `persons` people, one per keypoint type, whose tags sit
/// `separation` apart with per-joint spread below `spread`. Returns the
/// true person of each candidate alongside.
struct TagScene {
  std::vector<std::vector<KeypointCandidate>> candidates;
  std::vector<std::vector<std::size_t>> owner;  // [type][candidate] -> person
};

inline TagScene make_tag_scene(std::mt19937_64& rng, std::size_t persons, std::size_t types,
                               double separation, double spread) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> base(persons);
  const double offset = u(rng) * 10.0 - 5.0;
  for (std::size_t p = 0; p < persons; ++p) base[p] = offset + separation * static_cast<double>(p);
  std::shuffle(base.begin(), base.end(), rng);
  TagScene scene;
  scene.candidates.resize(types);
  scene.owner.resize(types);
  for (std::size_t t = 0; t < types; ++t) {
    std::vector<std::size_t> who(persons);
    for (std::size_t p = 0; p < persons; ++p) who[p] = p;
    std::shuffle(who.begin(), who.end(), rng);
    for (std::size_t p : who) {
      KeypointCandidate c;
      c.keypoint_type = t;
      c.position = {u(rng) * 100.0, u(rng) * 100.0};
      c.score = 0.2 + 0.8 * u(rng);
      c.tag = base[p] + spread * (2.0 * u(rng) - 1.0);
      scene.candidates[t].push_back(c);
      scene.owner[t].push_back(p);
    }
  }
  return scene;
}

/// True when every group holds candidates of exactly one person and every
/// person ends up in exactly one group.
inline bool grouping_matches(const TagScene& scene, const std::vector<PersonGroup>& groups,
                             std::size_t persons) {
  if (groups.size() != persons) return false;
  std::vector<bool> seen(persons, false);
  for (const PersonGroup& g : groups) {
    std::optional<std::size_t> who;
    for (std::size_t t = 0; t < g.members.size(); ++t) {
      if (!g.members[t]) return false;
      const std::size_t p = scene.owner[t][*g.members[t]];
      if (who && *who != p) return false;
      who = p;
    }
    if (!who || seen[*who]) return false;
    seen[*who] = true;
  }
  return true;
}

/// Straight-line OKS: mean over labeled joints of exp(-d^2 / (8 area sigma^2)).
inline double oks_oracle(const Pose& pred, const Pose& gt, double area) {
  double total = 0.0;
  int n = 0;
  for (std::size_t k = 0; k < gt.size(); ++k) {
    if (gt[k].visibility == Visibility::kNotLabeled) continue;
    const double dx = pred[k].position.x - gt[k].position.x;
    const double dy = pred[k].position.y - gt[k].position.y;
    total += std::exp(-(dx * dx + dy * dy) / (8.0 * area * kCocoSigmas[k] * kCocoSigmas[k]));
    ++n;
  }
  return total / n;
}

/// Ground truth on `image` at the template, area 100^2.
inline GroundTruth toy_ground_truth(std::int64_t image, Point2 shift = {100.0, 100.0}) {
  return {image, placed_template(40.0, shift), 10000.0};
}

/// Prediction equal to `gt` displaced so that its OKS is `target`.
inline Prediction prediction_with_oks(const GroundTruth& gt, double target, double score) {
  Prediction p{gt.image_id, gt.pose, score};
  for (std::size_t k = 0; k < p.pose.size(); ++k) {
    const double kappa = 2.0 * kCocoSigmas[k];
    p.pose[k].position.x += std::sqrt(-2.0 * gt.area * kappa * kappa * std::log(target));
  }
  return p;
}

}  // namespace skelcst::testing
