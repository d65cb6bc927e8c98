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

#include "skelcst/refine.hpp"

#include <algorithm>
#include <cmath>

namespace skelcst {

void validate_refine_config(const RefineConfig& cfg) {
  if (!(cfg.step_size > 0.0)) throw InvalidArgument("refine: step_size must be positive");
  if (!(cfg.convergence_tol > 0.0)) throw InvalidArgument("refine: convergence_tol must be positive");
  if (!(cfg.structure_weight >= 0.0) || !std::isfinite(cfg.structure_weight)) {
    throw InvalidArgument("refine: structure_weight must be a finite value >= 0");
  }
}

SimilarityTransform fit_similarity(const Pose& source, const Pose& target,
                                   double confidence_floor) {
  if (source.size() != target.size()) throw InvalidArgument("fit_similarity: pose sizes differ");
  std::vector<std::size_t> use;
  for (std::size_t k = 0; k < target.size(); ++k) {
    if (target[k].confidence >= confidence_floor && is_finite(target[k].position) &&
        is_finite(source[k].position)) {
      use.push_back(k);
    }
  }
  if (use.size() < 2) {
    throw InsufficientData("prior alignment needs at least two confident joints, found " +
                           std::to_string(use.size()));
  }
  Point2 src_mean{};
  Point2 dst_mean{};
  for (std::size_t k : use) {
    src_mean += source[k].position;
    dst_mean += target[k].position;
  }
  const double inv_n = 1.0 / static_cast<double>(use.size());
  src_mean *= inv_n;
  dst_mean *= inv_n;

  double cross = 0.0;
  double spread = 0.0;
  for (std::size_t k : use) {
    const Point2 s = source[k].position - src_mean;
    cross += dot(s, target[k].position - dst_mean);
    spread += squared_norm(s);
  }
  if (!(spread > 0.0)) {
    throw InsufficientData("prior alignment: confident joints coincide in the prior");
  }
  SimilarityTransform t;
  t.scale = cross / spread;
  t.shift = dst_mean - t.scale * src_mean;
  return t;
}

Pose align_prior(const Pose& avg_pose, const Pose& target, double confidence_floor) {
  const SimilarityTransform t = fit_similarity(avg_pose, target, confidence_floor);
  Pose out = avg_pose;
  for (Joint& j : out.joints) j.position = t.apply(j.position);
  return out;
}

double sample_bilinear(const Heatmap& hm, std::size_t k, const Point2& p, Point2* grad) {
  const double max_x = static_cast<double>(hm.width() - 1);
  const double max_y = static_cast<double>(hm.height() - 1);
  const double cx = std::clamp(p.x, 0.0, max_x);
  const double cy = std::clamp(p.y, 0.0, max_y);
  const bool x_free = p.x >= 0.0 && p.x <= max_x;
  const bool y_free = p.y >= 0.0 && p.y <= max_y;

  std::size_t x0 = static_cast<std::size_t>(std::floor(cx));
  std::size_t y0 = static_cast<std::size_t>(std::floor(cy));
  if (x0 + 1 >= hm.width()) x0 = hm.width() >= 2 ? hm.width() - 2 : 0;
  if (y0 + 1 >= hm.height()) y0 = hm.height() >= 2 ? hm.height() - 2 : 0;
  const std::size_t x1 = std::min(x0 + 1, hm.width() - 1);
  const std::size_t y1 = std::min(y0 + 1, hm.height() - 1);
  const double fx = cx - static_cast<double>(x0);
  const double fy = cy - static_cast<double>(y0);

  const double v00 = hm.at(k, y0, x0);
  const double v10 = hm.at(k, y0, x1);
  const double v01 = hm.at(k, y1, x0);
  const double v11 = hm.at(k, y1, x1);
  const double top = v00 + fx * (v10 - v00);
  const double bottom = v01 + fx * (v11 - v01);
  if (grad != nullptr) {
    grad->x = x_free && x1 != x0 ? (1.0 - fy) * (v10 - v00) + fy * (v11 - v01) : 0.0;
    grad->y = y_free && y1 != y0 ? bottom - top : 0.0;
  }
  return top + fy * (bottom - top);
}

ObjectiveValue refine_objective(const Pose& p, const Heatmap& hm, const Pose* prior,
                                const SkeletonTopology& topology, const EdgeWeights& weights,
                                const RefineConfig& cfg) {
  ObjectiveValue out;
  out.grad.assign(p.size(), Point2{});
  for (std::size_t k = 0; k < p.size(); ++k) {
    Point2 g{};
    out.value += 1.0 - sample_bilinear(hm, k, p[k].position, &g);
    out.grad[k] -= g;
  }
  if (prior != nullptr && cfg.structure_weight > 0.0) {
    const LossValue cst = constraint_loss(p, *prior, weights, topology, cfg.terms);
    out.value += cfg.structure_weight * cst.total;
    for (std::size_t k = 0; k < p.size(); ++k) out.grad[k] += cfg.structure_weight * cst.grad[k];
  }
  return out;
}

RefineResult refine_pose(const Pose& init, const Heatmap& hm, const SkeletonTopology& topology,
                         const EdgeWeights& weights, const Pose& avg_pose,
                         const RefineConfig& cfg) {
  validate_refine_config(cfg);
  const std::size_t k = topology.num_keypoints();
  if (init.size() != k || hm.channels() != k) {
    throw InvalidArgument("refine: pose and heatmap channel counts must match the topology");
  }
  if (hm.width() == 0 || hm.height() == 0) throw InvalidArgument("refine: empty heatmap");
  for (const Joint& j : init.joints) {
    if (!is_finite(j.position)) throw InvalidArgument("refine: initial pose is not finite");
  }

  RefineResult result;
  Pose prior;
  const Pose* prior_ptr = nullptr;
  if (cfg.structure_weight > 0.0 && cfg.prior == PriorKind::kAveragePoseScaled) {
    try {
      prior = align_prior(avg_pose, init, cfg.confidence_floor);
      prior_ptr = &prior;
    } catch (const InsufficientData& e) {
      result.warnings.push_back(std::string("prior disabled: ") + e.what());
    }
  }

  Pose current = init;
  if (prior_ptr != nullptr && cfg.seed_unseen_from_prior) {
    for (std::size_t j = 0; j < k; ++j) {
      if (init[j].confidence < cfg.confidence_floor) current[j].position = prior[j].position;
    }
  }
  ObjectiveValue f = refine_objective(current, hm, prior_ptr, topology, weights, cfg);
  result.trace.push_back(f.value);

  Pose candidate = current;
  for (std::size_t step = 0; step < cfg.steps; ++step) {
    const bool flat = std::all_of(f.grad.begin(), f.grad.end(),
                                  [](const Point2& g) { return g.x == 0.0 && g.y == 0.0; });
    if (flat) break;

    double alpha = cfg.step_size;
    bool accepted = false;
    ObjectiveValue next;
    for (std::size_t h = 0; h <= cfg.max_halvings; ++h, alpha *= 0.5) {
      for (std::size_t j = 0; j < k; ++j) {
        candidate[j].position = current[j].position - alpha * f.grad[j];
      }
      next = refine_objective(candidate, hm, prior_ptr, topology, weights, cfg);
      if (next.value < f.value) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;

    const double delta = f.value - next.value;
    std::swap(current, candidate);
    f = std::move(next);
    result.trace.push_back(f.value);
    ++result.iterations;
    if (delta < cfg.convergence_tol) break;
  }
  result.pose = std::move(current);
  return result;
}

}  // namespace skelcst
