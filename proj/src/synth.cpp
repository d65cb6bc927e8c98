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

#include "skelcst/synth.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <thread>

#include "skelcst/decode.hpp"
#include "skelcst/loss.hpp"

namespace skelcst {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
    : engine_(splitmix64(seed + 0x9E3779B97F4A7C15ull * (stream + 1))) {}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal(double mean, double stddev) {
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  return mean + stddev * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::size_t Rng::index(std::size_t n) {
  return std::min(n - 1, static_cast<std::size_t>(uniform() * static_cast<double>(n)));
}

std::string to_string(Variant v) {
  switch (v) {
    case Variant::kNoRefine:
      return "no_refine";
    case Variant::kRefineLength:
      return "refine_length";
    case Variant::kRefineLengthAngle:
      return "refine_length_angle";
  }
  return "unknown";
}

namespace {

// Left arm, right arm, left leg, right leg as (proximal, distal) channels.
constexpr std::array<std::array<std::size_t, 2>, 4> kLimbs = {{{7, 9}, {8, 10}, {13, 15}, {14, 16}}};

double bbox_area(const Pose& pose) {
  double x0 = pose[0].position.x, x1 = x0, y0 = pose[0].position.y, y1 = y0;
  for (const Joint& j : pose.joints) {
    x0 = std::min(x0, j.position.x);
    x1 = std::max(x1, j.position.x);
    y0 = std::min(y0, j.position.y);
    y1 = std::max(y1, j.position.y);
  }
  return (x1 - x0) * (y1 - y0);
}

struct PersonOutcome {
  Pose gt;
  double area = 0.0;
  double score = 0.0;
  std::array<Pose, kAllVariants.size()> preds;
};

struct TrialOutcome {
  std::vector<PersonOutcome> persons;
};

TrialOutcome run_trial(std::size_t trial, const SynthConfig& cfg, const Pose& tpl,
                       Point2 tpl_center, const SkeletonTopology& topology,
                       const EdgeWeights& weights) {
  Rng rng(cfg.seed, trial);
  const std::size_t k = topology.num_keypoints();
  TrialOutcome out;
  for (std::size_t p = 0; p < cfg.persons; ++p) {
    const double scale = cfg.torso_px * rng.uniform(1.0 - cfg.scale_spread, 1.0 + cfg.scale_spread);
    const Point2 center{0.5 * static_cast<double>(cfg.grid_width - 1) + rng.uniform(-8.0, 8.0),
                        0.5 * static_cast<double>(cfg.grid_height - 1) + rng.uniform(-8.0, 8.0)};
    PersonOutcome person;
    person.gt = Pose(k);
    Pose peaks(k);
    for (std::size_t j = 0; j < k; ++j) {
      Point2 pos = center + scale * (tpl[j].position - tpl_center);
      pos.x += rng.normal(0.0, cfg.pose_jitter_px);
      pos.y += rng.normal(0.0, cfg.pose_jitter_px);
      person.gt[j] = Joint{pos, Visibility::kLabeledVisible, 1.0};
      Point2 peak = pos;
      peak.x += rng.normal(0.0, cfg.noise_px);
      peak.y += rng.normal(0.0, cfg.noise_px);
      peaks[j] = Joint{peak, Visibility::kLabeledVisible, 1.0};
    }
    const std::size_t limb = rng.index(kLimbs.size());

    HeatmapTarget target = render_gaussian_target(peaks, cfg.grid_width, cfg.grid_height, cfg.sigma);
    if (cfg.occlude_limb) {
      for (std::size_t ch : kLimbs[limb]) {
        float* data = target.heatmap.channel(ch);
        std::fill(data, data + target.heatmap.channel_size(), 0.0f);
      }
    }
    const Heatmap& hm = target.heatmap;
    const Pose init = decode_argmax(hm, ArgmaxOptions{true, cfg.score_floor});

    double conf = 0.0;
    for (const Joint& j : init.joints) conf += j.confidence;
    person.score = conf / static_cast<double>(k);
    person.area = bbox_area(person.gt);

    for (std::size_t v = 0; v < kAllVariants.size(); ++v) {
      if (kAllVariants[v] == Variant::kNoRefine) {
        person.preds[v] = init;
        continue;
      }
      RefineConfig rc = cfg.refine;
      rc.structure_weight = cfg.structure_weight;
      rc.terms = ConstraintTerms{true, kAllVariants[v] == Variant::kRefineLengthAngle};
      person.preds[v] = refine_pose(init, hm, topology, weights, tpl, rc).pose;
    }
    out.persons.push_back(std::move(person));
  }
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

SynthReport run_synthetic_experiment(const SynthConfig& cfg, const Pose& template_pose,
                                     const SkeletonTopology& topology) {
  if (cfg.trials < 1) throw InvalidArgument("synthetic experiment needs at least one trial");
  if (cfg.persons < 1) throw InvalidArgument("synthetic experiment needs at least one person");
  if (topology.num_keypoints() != kCocoNumKeypoints || template_pose.size() != kCocoNumKeypoints) {
    throw InvalidArgument("synthetic experiment uses the 17-keypoint COCO skeleton");
  }
  if (!(cfg.noise_px >= 0.0) || !(cfg.pose_jitter_px >= 0.0) || !(cfg.sigma > 0.0)) {
    throw InvalidArgument("synthetic experiment: noise, jitter and sigma must be non-negative");
  }
  validate_refine_config([&] {
    RefineConfig rc = cfg.refine;
    rc.structure_weight = cfg.structure_weight;
    return rc;
  }());

  SynthReport report;
  report.weights = compute_edge_weights(template_pose, topology, cfg.scheme);

  double y0 = template_pose[0].position.y, y1 = y0, x0 = template_pose[0].position.x, x1 = x0;
  for (const Joint& j : template_pose.joints) {
    x0 = std::min(x0, j.position.x);
    x1 = std::max(x1, j.position.x);
    y0 = std::min(y0, j.position.y);
    y1 = std::max(y1, j.position.y);
  }
  const Point2 tpl_center{0.5 * (x0 + x1), 0.5 * (y0 + y1)};

  std::vector<TrialOutcome> outcomes(cfg.trials);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t = next++; t < cfg.trials; t = next++) {
      outcomes[t] = run_trial(t, cfg, template_pose, tpl_center, topology, report.weights);
    }
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(cfg.threads, cfg.trials));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
  }

  std::array<std::vector<double>, kAllVariants.size()> per_variant;
  std::array<std::vector<Prediction>, kAllVariants.size()> preds;
  std::vector<GroundTruth> gts;
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    for (const PersonOutcome& person : outcomes[t].persons) {
      gts.push_back({static_cast<std::int64_t>(t), person.gt, person.area});
    }
    for (std::size_t v = 0; v < kAllVariants.size(); ++v) {
      double sum = 0.0;
      for (const PersonOutcome& person : outcomes[t].persons) {
        sum += oks(person.preds[v], person.gt, person.area);
        preds[v].push_back({static_cast<std::int64_t>(t), person.preds[v], person.score});
      }
      const double mean = sum / static_cast<double>(outcomes[t].persons.size());
      report.records.push_back({t, kAllVariants[v], mean});
      per_variant[v].push_back(mean);
    }
  }

  for (std::size_t v = 0; v < kAllVariants.size(); ++v) {
    VariantSummary s;
    s.variant = kAllVariants[v];
    const auto& xs = per_variant[v];
    for (double x : xs) s.mean_oks += x;
    s.mean_oks /= static_cast<double>(xs.size());
    for (double x : xs) s.stddev_oks += (x - s.mean_oks) * (x - s.mean_oks);
    s.stddev_oks = std::sqrt(s.stddev_oks / static_cast<double>(xs.size()));
    s.eval = evaluate(preds[v], gts);
    report.summary.push_back(std::move(s));
  }
  return report;
}

std::string format_trials_csv(const SynthReport& report) {
  std::string out = "trial,variant,oks\n";
  for (const TrialRecord& r : report.records) {
    out += std::to_string(r.trial) + "," + to_string(r.variant) + "," + fmt(r.oks) + "\n";
  }
  return out;
}

std::string format_plot_data(const SynthReport& report) {
  std::string out = "# index variant mean_oks stddev_oks ap\n";
  for (std::size_t i = 0; i < report.summary.size(); ++i) {
    const VariantSummary& s = report.summary[i];
    out += std::to_string(i) + " " + to_string(s.variant) + " " + fmt(s.mean_oks) + " " +
           fmt(s.stddev_oks) + " " + fmt(s.eval.ap) + "\n";
  }
  return out;
}

std::string format_summary(const SynthReport& report) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "%-22s %9s %9s %7s %7s %7s %7s\n", "variant", "mean_oks",
                "std_oks", "AP", "AP50", "AP75", "AR50");
  out << line;
  for (const VariantSummary& s : report.summary) {
    std::snprintf(line, sizeof line, "%-22s %9.5f %9.5f %7.4f %7.4f %7.4f %7.4f\n",
                  to_string(s.variant).c_str(), s.mean_oks, s.stddev_oks, s.eval.ap, s.eval.ap50,
                  s.eval.ap75, s.eval.ar50);
    out << line;
  }
  return out.str();
}

}  // namespace skelcst
