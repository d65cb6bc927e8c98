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

/// \file synth.hpp
/// \brief Desk-scale synthetic experiment: sample poses from a template
/// skeleton, render heatmaps, optionally hide a limb and perturb the peaks,
/// decode, refine, and score with OKS.

#include <array>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "skelcst/metrics.hpp"
#include "skelcst/refine.hpp"
#include "skelcst/topology.hpp"

namespace skelcst {

/// Deterministic stream: std::mt19937_64 seeded with
/// splitmix64(seed + 0x9E3779B97F4A7C15 * (stream + 1)). Uniforms take the
/// top 53 bits of one draw; normals use Box-Muller on two uniforms and
/// return the cosine branch only.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream);

  /// In [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal(double mean = 0.0, double stddev = 1.0);
  /// In [0, n).
  std::size_t index(std::size_t n);

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

enum class Variant { kNoRefine, kRefineLength, kRefineLengthAngle };
inline constexpr std::array<Variant, 3> kAllVariants = {
    Variant::kNoRefine, Variant::kRefineLength, Variant::kRefineLengthAngle};
std::string to_string(Variant v);

struct SynthConfig {
  std::size_t persons = 1;
  /// Std-dev of the displacement applied to each rendered peak, px per axis.
  double noise_px = 0.0;
  bool occlude_limb = false;
  std::size_t trials = 200;
  std::uint64_t seed = 0;
  double structure_weight = 1.0;
  WeightScheme scheme = WeightScheme::kProportionalLength;
  std::size_t threads = 1;

  std::size_t grid_width = 192;
  std::size_t grid_height = 256;
  double sigma = 2.0;
  /// Mean torso length (shoulder midpoint to hip midpoint) in px.
  double torso_px = 50.0;
  /// Uniform relative scale spread around torso_px.
  double scale_spread = 0.1;
  /// Per-joint deviation from the template, px per axis.
  double pose_jitter_px = 0.0;
  /// Joints with decoded confidence below this are treated as unseen.
  double score_floor = 0.1;

  RefineConfig refine;
};

struct TrialRecord {
  std::size_t trial = 0;
  Variant variant = Variant::kNoRefine;
  /// Mean OKS over the trial's persons.
  double oks = 0.0;
};

struct VariantSummary {
  Variant variant = Variant::kNoRefine;
  double mean_oks = 0.0;
  double stddev_oks = 0.0;
  EvalResult eval;
};

struct SynthReport {
  std::vector<TrialRecord> records;  // trial-major, variants in kAllVariants order
  std::vector<VariantSummary> summary;
  EdgeWeights weights;
};

/// `template_pose` is a torso-normalized average pose (see compute_average_pose).
SynthReport run_synthetic_experiment(const SynthConfig& cfg, const Pose& template_pose,
                                     const SkeletonTopology& topology = build_coco_skeleton());

std::string format_trials_csv(const SynthReport& report);
/// Whitespace-separated columns for gnuplot: index, variant, mean, stddev, ap.
std::string format_plot_data(const SynthReport& report);
std::string format_summary(const SynthReport& report);

}  // namespace skelcst
