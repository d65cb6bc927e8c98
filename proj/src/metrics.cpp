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

#include "skelcst/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace skelcst {

double oks(const Pose& pred, const Pose& gt, double gt_area, std::span<const double> sigmas) {
  if (pred.size() != gt.size() || gt.size() != sigmas.size()) {
    throw InvalidArgument("oks: pose sizes and sigma count disagree");
  }
  if (!(gt_area > 0.0)) throw InvalidArgument("oks: ground-truth area must be positive");
  double sum = 0.0;
  std::size_t labeled = 0;
  for (std::size_t k = 0; k < gt.size(); ++k) {
    if (!gt[k].labeled()) continue;
    const double kappa = 2.0 * sigmas[k];
    const double d2 = squared_norm(pred[k].position - gt[k].position);
    sum += std::exp(-d2 / (2.0 * gt_area * kappa * kappa));
    ++labeled;
  }
  if (labeled == 0) throw InvalidArgument("oks: ground truth has no labeled keypoint");
  return sum / static_cast<double>(labeled);
}

std::vector<double> default_oks_thresholds() {
  std::vector<double> t(10);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = 0.5 + static_cast<double>(i) * 0.05;
  t.back() = 0.95;
  return t;
}

namespace {

bool in_band(double area, AreaRange range) { return area > range.lo && area <= range.hi; }

double keypoint_bbox_area(const Pose& pose) {
  if (pose.size() == 0) return 0.0;
  double x0 = pose[0].position.x, x1 = x0, y0 = pose[0].position.y, y1 = y0;
  for (const Joint& j : pose.joints) {
    x0 = std::min(x0, j.position.x);
    x1 = std::max(x1, j.position.x);
    y0 = std::min(y0, j.position.y);
    y1 = std::max(y1, j.position.y);
  }
  return (x1 - x0) * (y1 - y0);
}

struct ScoredDetection {
  double score;
  bool matched;
};

// Matches one threshold / area band and returns the non-ignored detections in
// the order they enter the PR curve, plus the non-ignored ground-truth count.
std::vector<ScoredDetection> match_all(const std::vector<Prediction>& preds,
                                       const std::vector<GroundTruth>& gts, double threshold,
                                       AreaRange range, std::span<const double> sigmas,
                                       std::size_t& num_gt) {
  std::map<std::int64_t, std::vector<std::size_t>> gt_by_image;
  std::map<std::int64_t, std::vector<std::size_t>> pred_by_image;
  num_gt = 0;
  for (std::size_t i = 0; i < gts.size(); ++i) {
    if (gts[i].pose.num_labeled() == 0) continue;
    gt_by_image[gts[i].image_id].push_back(i);
    if (in_band(gts[i].area, range)) ++num_gt;
  }
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (!std::isfinite(preds[i].score)) throw InvalidArgument("prediction score is not finite");
    pred_by_image[preds[i].image_id].push_back(i);
  }

  // Per prediction: matched / ignored.
  std::vector<char> matched(preds.size(), 0);
  std::vector<char> ignored(preds.size(), 0);
  for (auto& [image, pidx] : pred_by_image) {
    std::stable_sort(pidx.begin(), pidx.end(),
                     [&](std::size_t a, std::size_t b) { return preds[a].score > preds[b].score; });
    std::vector<std::size_t> gidx;
    if (auto it = gt_by_image.find(image); it != gt_by_image.end()) gidx = it->second;
    // Ground truths inside the band are tried first.
    std::stable_partition(gidx.begin(), gidx.end(),
                          [&](std::size_t g) { return in_band(gts[g].area, range); });
    std::vector<char> gt_taken(gidx.size(), 0);

    for (std::size_t p : pidx) {
      double best = std::min(threshold, 1.0 - 1e-10);
      std::ptrdiff_t m = -1;
      for (std::size_t gi = 0; gi < gidx.size(); ++gi) {
        if (gt_taken[gi]) continue;
        const bool g_ignored = !in_band(gts[gidx[gi]].area, range);
        if (m >= 0 && in_band(gts[gidx[m]].area, range) && g_ignored) break;
        const double s = oks(preds[p].pose, gts[gidx[gi]].pose, gts[gidx[gi]].area, sigmas);
        if (s < best) continue;
        best = s;
        m = static_cast<std::ptrdiff_t>(gi);
      }
      if (m >= 0) {
        gt_taken[m] = 1;
        matched[p] = 1;
        ignored[p] = in_band(gts[gidx[m]].area, range) ? 0 : 1;
      } else {
        ignored[p] = in_band(keypoint_bbox_area(preds[p].pose), range) ? 0 : 1;
      }
    }
  }

  std::vector<std::size_t> order(preds.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return preds[a].score > preds[b].score; });
  std::vector<ScoredDetection> out;
  for (std::size_t p : order) {
    if (!ignored[p]) out.push_back({preds[p].score, matched[p] != 0});
  }
  return out;
}

}  // namespace

double average_precision(const std::vector<Prediction>& preds, const std::vector<GroundTruth>& gts,
                         double threshold, AreaRange range, double* recall,
                         std::span<const double> sigmas) {
  std::size_t num_gt = 0;
  const auto dets = match_all(preds, gts, threshold, range, sigmas, num_gt);
  if (recall != nullptr) *recall = 0.0;
  if (num_gt == 0) return 0.0;

  std::vector<double> rc(dets.size());
  std::vector<double> pr(dets.size());
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t i = 0; i < dets.size(); ++i) {
    dets[i].matched ? ++tp : ++fp;
    rc[i] = static_cast<double>(tp) / static_cast<double>(num_gt);
    pr[i] = static_cast<double>(tp) / static_cast<double>(tp + fp);
  }
  if (recall != nullptr && !rc.empty()) *recall = rc.back();
  for (std::size_t i = pr.size(); i > 1; --i) {
    pr[i - 2] = std::max(pr[i - 2], pr[i - 1]);
  }

  constexpr std::size_t kRecallPoints = 101;
  double sum = 0.0;
  for (std::size_t r = 0; r < kRecallPoints; ++r) {
    const double level = r + 1 == kRecallPoints ? 1.0 : static_cast<double>(r) * 0.01;
    const auto it = std::lower_bound(rc.begin(), rc.end(), level);
    if (it != rc.end()) sum += pr[static_cast<std::size_t>(it - rc.begin())];
  }
  return sum / static_cast<double>(kRecallPoints);
}

EvalResult evaluate(const std::vector<Prediction>& preds, const std::vector<GroundTruth>& gts,
                    std::vector<double> thresholds, std::span<const double> sigmas) {
  if (thresholds.empty()) throw InvalidArgument("evaluate: no OKS thresholds");
  if (!std::is_sorted(thresholds.begin(), thresholds.end())) {
    throw InvalidArgument("evaluate: thresholds must be sorted ascending");
  }
  EvalResult r;
  r.thresholds = thresholds;
  double medium = 0.0;
  double large = 0.0;
  for (double t : thresholds) {
    double recall = 0.0;
    const double ap = average_precision(preds, gts, t, kAreaAll, &recall, sigmas);
    r.ap_per_threshold.push_back(ap);
    r.ap += ap;
    medium += average_precision(preds, gts, t, kAreaMedium, nullptr, sigmas);
    large += average_precision(preds, gts, t, kAreaLarge, nullptr, sigmas);
    if (std::abs(t - 0.50) < 1e-9) {
      r.ap50 = ap;
      r.ar50 = recall;
    }
    if (std::abs(t - 0.75) < 1e-9) r.ap75 = ap;
  }
  const double n = static_cast<double>(thresholds.size());
  r.ap /= n;
  r.ap_medium = medium / n;
  r.ap_large = large / n;
  return r;
}

}  // namespace skelcst
