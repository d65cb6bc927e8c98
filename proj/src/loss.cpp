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

#include "skelcst/loss.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace skelcst {

LossValue constraint_loss(const Pose& pred, const Pose& gt, const EdgeWeights& weights,
                          const SkeletonTopology& topology, ConstraintTerms terms) {
  const std::size_t k = topology.num_keypoints();
  if (weights.lambdas.size() != topology.num_edges()) {
    throw InvalidArgument("edge weight count " + std::to_string(weights.lambdas.size()) +
                          " does not match topology edge count " +
                          std::to_string(topology.num_edges()));
  }
  if (pred.size() != k || gt.size() != k) {
    throw InvalidArgument("pose keypoint count does not match the topology");
  }

  LossValue out;
  out.grad.assign(k, Point2{});
  for (std::size_t i = 0; i < topology.num_edges(); ++i) {
    const Edge& e = topology.edges[i];
    if (!gt[e.from].labeled() || !gt[e.to].labeled()) continue;
    ++out.active_edges;

    const Point2 pe = pred[e.from].position - pred[e.to].position;
    const Point2 ge = gt[e.from].position - gt[e.to].position;
    if (!is_finite(pe)) {
      throw InvalidArgument("predicted edge " + std::to_string(i) + " is not finite");
    }

    Point2 g{};
    if (terms.length) {
      const double lambda = weights.lambdas[i];
      const Point2 diff = pe - ge;
      out.length_term += lambda * squared_norm(diff);
      g += (2.0 * lambda) * diff;
    }
    if (terms.angle) {
      const double pn = norm(pe);
      const double gn = norm(ge);
      if (pn >= kDegenerateEdgeLength && gn >= kDegenerateEdgeLength) {
        const double cos_theta = dot(pe, ge) / (pn * gn);
        out.angle_term += 1.0 - std::clamp(cos_theta, -1.0, 1.0);
        // d(1 - cos)/d(pe) = -(ge / (|pe||ge|) - cos * pe / |pe|^2)
        g -= ge * (1.0 / (pn * gn)) - pe * (cos_theta / (pn * pn));
      }
    }
    out.grad[e.from] += g;
    out.grad[e.to] -= g;
  }
  out.total = out.length_term + out.angle_term;
  return out;
}

GradientCheck check_gradient(const std::function<double(std::span<const double>)>& f,
                             std::span<const double> x, std::span<const double> analytic,
                             double h) {
  if (!(h > 0.0)) throw InvalidArgument("finite-difference step must be positive");
  if (x.size() != analytic.size()) throw InvalidArgument("gradient size mismatch");

  GradientCheck result;
  std::vector<double> probe(x.begin(), x.end());
  for (std::size_t i = 0; i < probe.size(); ++i) {
    const double orig = probe[i];
    probe[i] = orig + h;
    const double up = f(probe);
    probe[i] = orig - h;
    const double down = f(probe);
    probe[i] = orig;

    const double numeric = (up - down) / (2.0 * h);
    const double a = analytic[i];
    const double abs_err = std::abs(a - numeric);
    const double err = std::abs(a) < 1e-8 ? abs_err : abs_err / std::abs(a);
    if (i == 0 || err > result.max_error) {
      result.max_error = err;
      result.worst_index = i;
      result.worst_analytic = a;
      result.worst_numeric = numeric;
    }
  }
  return result;
}

std::vector<double> flatten_positions(const Pose& pose) {
  std::vector<double> flat;
  flat.reserve(2 * pose.size());
  for (const Joint& j : pose.joints) {
    flat.push_back(j.position.x);
    flat.push_back(j.position.y);
  }
  return flat;
}

void unflatten_positions(std::span<const double> flat, Pose& pose) {
  for (std::size_t k = 0; k < pose.size(); ++k) {
    pose[k].position = {flat[2 * k], flat[2 * k + 1]};
  }
}

double constraint_loss_grad_check(const Pose& pred, const Pose& gt, const EdgeWeights& weights,
                                  const SkeletonTopology& topology, double h,
                                  ConstraintTerms terms) {
  const LossValue at = constraint_loss(pred, gt, weights, topology, terms);
  std::vector<double> analytic;
  analytic.reserve(2 * at.grad.size());
  for (const Point2& g : at.grad) {
    analytic.push_back(g.x);
    analytic.push_back(g.y);
  }
  Pose probe = pred;
  auto f = [&](std::span<const double> flat) {
    unflatten_positions(flat, probe);
    return constraint_loss(probe, gt, weights, topology, terms).total;
  };
  const std::vector<double> x = flatten_positions(pred);
  return check_gradient(f, x, analytic, h).max_error;
}

HeatmapTarget render_gaussian_target(const Pose& gt, std::size_t width, std::size_t height,
                                     double sigma) {
  if (width < 1 || height < 1) throw InvalidArgument("heatmap grid must be at least 1x1");
  if (!(sigma > 0.0)) throw InvalidArgument("gaussian sigma must be positive");

  HeatmapTarget target{Heatmap(width, height, gt.size()), sigma, {}};
  const double inv_two_sigma_sq = 1.0 / (2.0 * sigma * sigma);
  for (std::size_t k = 0; k < gt.size(); ++k) {
    if (!gt[k].labeled()) continue;
    const Point2 c = gt[k].position;
    if (!is_finite(c)) throw InvalidArgument("labeled keypoint " + std::to_string(k) + " is not finite");
    if (c.x < 0.0 || c.y < 0.0 || c.x > static_cast<double>(width - 1) ||
        c.y > static_cast<double>(height - 1)) {
      target.off_grid_keypoints.push_back(k);
    }
    float* ch = target.heatmap.channel(k);
    for (std::size_t y = 0; y < height; ++y) {
      const double dy = static_cast<double>(y) - c.y;
      for (std::size_t x = 0; x < width; ++x) {
        const double dx = static_cast<double>(x) - c.x;
        ch[y * width + x] = static_cast<float>(std::exp(-(dx * dx + dy * dy) * inv_two_sigma_sq));
      }
    }
  }
  return target;
}

double heatmap_mse(const Heatmap& pred, const Heatmap& target) {
  if (!pred.same_shape(target)) throw InvalidArgument("heatmap shapes differ");
  const auto& a = pred.data();
  const auto& b = target.data();
  if (a.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    sum += d * d;
  }
  return sum / static_cast<double>(a.size());
}

double combined_loss(double original, double cst) { return original + cst; }

}  // namespace skelcst
