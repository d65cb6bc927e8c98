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

#include "skelcst/decode.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace skelcst {

namespace {

double clamp_confidence(double v) { return std::clamp(v, 0.0, 1.0); }

// Quarter-offset toward the larger neighbour; interior cells only.
Point2 quarter_offset(const Heatmap& hm, std::size_t k, std::size_t x, std::size_t y) {
  Point2 shift{};
  if (x > 0 && x + 1 < hm.width()) {
    const float right = hm.at(k, y, x + 1);
    const float left = hm.at(k, y, x - 1);
    if (right > left) shift.x = 0.25;
    if (right < left) shift.x = -0.25;
  }
  if (y > 0 && y + 1 < hm.height()) {
    const float down = hm.at(k, y + 1, x);
    const float up = hm.at(k, y - 1, x);
    if (down > up) shift.y = 0.25;
    if (down < up) shift.y = -0.25;
  }
  return shift;
}

bool is_local_max(const Heatmap& hm, std::size_t k, std::size_t x, std::size_t y) {
  const float v = hm.at(k, y, x);
  const std::size_t x0 = x == 0 ? 0 : x - 1;
  const std::size_t y0 = y == 0 ? 0 : y - 1;
  const std::size_t x1 = std::min(x + 1, hm.width() - 1);
  const std::size_t y1 = std::min(y + 1, hm.height() - 1);
  for (std::size_t yy = y0; yy <= y1; ++yy) {
    for (std::size_t xx = x0; xx <= x1; ++xx) {
      if (hm.at(k, yy, xx) > v) return false;
    }
  }
  return true;
}

std::vector<std::vector<KeypointCandidate>> topn_impl(const Heatmap& hm, const Heatmap* tags,
                                                      const TopNOptions& options) {
  if (options.n < 1) throw InvalidArgument("top-n requires n >= 1");
  std::vector<std::vector<KeypointCandidate>> out(hm.channels());
  const std::size_t w = hm.width();
  const std::size_t r = options.nms_radius;

  for (std::size_t k = 0; k < hm.channels(); ++k) {
    const float* ch = hm.channel(k);
    std::vector<std::size_t> peaks;
    for (std::size_t y = 0; y < hm.height(); ++y) {
      for (std::size_t x = 0; x < w; ++x) {
        if (static_cast<double>(ch[y * w + x]) >= options.score_floor && is_local_max(hm, k, x, y)) {
          peaks.push_back(y * w + x);
        }
      }
    }
    std::stable_sort(peaks.begin(), peaks.end(),
                     [ch](std::size_t a, std::size_t b) { return ch[a] > ch[b]; });

    std::vector<std::size_t> kept;
    for (std::size_t idx : peaks) {
      if (kept.size() >= options.n) break;
      const std::size_t x = idx % w;
      const std::size_t y = idx / w;
      const bool suppressed = std::any_of(kept.begin(), kept.end(), [&](std::size_t o) {
        const std::size_t ox = o % w;
        const std::size_t oy = o / w;
        const std::size_t dx = x > ox ? x - ox : ox - x;
        const std::size_t dy = y > oy ? y - oy : oy - y;
        return std::max(dx, dy) <= r;
      });
      if (!suppressed) kept.push_back(idx);
    }

    for (std::size_t idx : kept) {
      const std::size_t x = idx % w;
      const std::size_t y = idx / w;
      KeypointCandidate c;
      c.keypoint_type = k;
      c.position = {static_cast<double>(x), static_cast<double>(y)};
      if (options.subpixel) c.position += quarter_offset(hm, k, x, y);
      c.score = ch[idx];
      c.tag = tags != nullptr ? static_cast<double>(tags->at(k, y, x)) : 0.0;
      out[k].push_back(c);
    }
  }
  return out;
}

}  // namespace

Pose decode_argmax(const Heatmap& hm, const ArgmaxOptions& options) {
  Pose pose(hm.channels());
  const std::size_t n = hm.channel_size();
  for (std::size_t k = 0; k < hm.channels(); ++k) {
    const float* ch = hm.channel(k);
    const std::size_t idx =
        n == 0 ? 0 : static_cast<std::size_t>(std::max_element(ch, ch + n) - ch);
    const double peak = n == 0 ? 0.0 : static_cast<double>(ch[idx]);
    const std::size_t x = n == 0 ? 0 : idx % hm.width();
    const std::size_t y = n == 0 ? 0 : idx / hm.width();

    Joint& j = pose[k];
    j.position = {static_cast<double>(x), static_cast<double>(y)};
    if (options.subpixel && n > 0) j.position += quarter_offset(hm, k, x, y);
    j.confidence = clamp_confidence(peak);
    j.visibility = peak < options.score_floor ? Visibility::kLabeledInvisible
                                              : Visibility::kLabeledVisible;
  }
  return pose;
}

Pose decode_soft_argmax(const Heatmap& hm, double temperature) {
  if (!(temperature > 0.0)) throw InvalidArgument("soft-argmax temperature must be positive");
  Pose pose(hm.channels());
  const std::size_t w = hm.width();
  const std::size_t n = hm.channel_size();
  for (std::size_t k = 0; k < hm.channels(); ++k) {
    const float* ch = hm.channel(k);
    if (n == 0) continue;
    const double peak = *std::max_element(ch, ch + n);
    double total = 0.0;
    Point2 acc{};
    for (std::size_t i = 0; i < n; ++i) {
      const double wgt = std::exp((static_cast<double>(ch[i]) - peak) / temperature);
      total += wgt;
      acc += wgt * Point2{static_cast<double>(i % w), static_cast<double>(i / w)};
    }
    pose[k] = Joint{acc * (1.0 / total), Visibility::kLabeledVisible, clamp_confidence(peak)};
  }
  return pose;
}

std::vector<std::vector<KeypointCandidate>> decode_topn(const Heatmap& hm,
                                                        const TopNOptions& options) {
  return topn_impl(hm, nullptr, options);
}

std::vector<std::vector<KeypointCandidate>> decode_topn(const Heatmap& hm, const Heatmap& tags,
                                                        const TopNOptions& options) {
  if (!hm.same_shape(tags)) throw InvalidArgument("tag map shape differs from the heatmap");
  return topn_impl(hm, &tags, options);
}

std::vector<std::size_t> coco_grouping_order() {
  return {5, 6, 11, 12, 7, 8, 9, 10, 13, 14, 15, 16, 0, 1, 2, 3, 4};
}

std::vector<PersonGroup> group_by_tags(
    const std::vector<std::vector<KeypointCandidate>>& candidates, double tag_threshold,
    std::vector<std::size_t> order) {
  const std::size_t k = candidates.size();
  if (order.empty()) {
    if (k == 17) {
      order = coco_grouping_order();
    } else {
      order.resize(k);
      std::iota(order.begin(), order.end(), std::size_t{0});
    }
  }
  if (order.size() != k) throw InvalidArgument("grouping order must list every channel once");
  {
    std::vector<std::size_t> sorted = order;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < k; ++i) {
      if (sorted[i] != i) throw InvalidArgument("grouping order must list every channel once");
    }
  }

  struct Group {
    std::vector<std::optional<std::size_t>> members;
    double tag_sum = 0.0;
    std::size_t count = 0;
    double mean() const { return tag_sum / static_cast<double>(count); }
  };
  std::vector<Group> groups;

  for (std::size_t type : order) {
    const auto& cands = candidates[type];
    for (const auto& c : cands) {
      if (!std::isfinite(c.tag)) throw InvalidArgument("candidate tag is not finite");
    }

    struct Match {
      double distance;
      double score;
      std::size_t cand;
      std::size_t group;
    };
    std::vector<Match> matches;
    for (std::size_t ci = 0; ci < cands.size(); ++ci) {
      for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        const double d = std::abs(cands[ci].tag - groups[gi].mean());
        if (d < tag_threshold) matches.push_back({d, cands[ci].score, ci, gi});
      }
    }
    std::stable_sort(matches.begin(), matches.end(), [](const Match& a, const Match& b) {
      if (a.distance != b.distance) return a.distance < b.distance;
      return a.score > b.score;
    });

    const std::size_t existing = groups.size();
    std::vector<bool> cand_used(cands.size(), false);
    std::vector<bool> group_used(existing, false);
    for (const Match& m : matches) {
      if (cand_used[m.cand] || group_used[m.group]) continue;
      cand_used[m.cand] = true;
      group_used[m.group] = true;
      groups[m.group].members[type] = m.cand;
    }

    // Unmatched candidates seed new groups, strongest first.
    std::vector<std::size_t> leftovers;
    for (std::size_t ci = 0; ci < cands.size(); ++ci) {
      if (!cand_used[ci]) leftovers.push_back(ci);
    }
    std::stable_sort(leftovers.begin(), leftovers.end(), [&](std::size_t a, std::size_t b) {
      return cands[a].score > cands[b].score;
    });
    for (std::size_t ci : leftovers) {
      Group g;
      g.members.assign(k, std::nullopt);
      g.members[type] = ci;
      groups.push_back(std::move(g));
    }

    // Means update once per channel so every candidate of this channel saw
    // the same group tags.
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
      if (gi < existing && !group_used[gi]) continue;
      groups[gi].tag_sum += cands[*groups[gi].members[type]].tag;
      ++groups[gi].count;
    }
  }

  std::vector<PersonGroup> out;
  out.reserve(groups.size());
  for (const Group& g : groups) {
    PersonGroup p;
    p.pose = Pose(k);
    p.members = g.members;
    p.mean_tag = g.mean();
    for (std::size_t type = 0; type < k; ++type) {
      if (!g.members[type]) continue;
      const KeypointCandidate& c = candidates[type][*g.members[type]];
      p.pose[type] = Joint{c.position, Visibility::kLabeledVisible, clamp_confidence(c.score)};
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace skelcst
