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

#include "cli.hpp"

#include <cstdio>
#include <filesystem>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "skelcst/decode.hpp"
#include "skelcst/io.hpp"
#include "skelcst/loss.hpp"
#include "skelcst/metrics.hpp"
#include "skelcst/refine.hpp"
#include "skelcst/synth.hpp"
#include "skelcst/topology.hpp"

namespace skelcst::cli {

namespace {

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string edge_name(const SkeletonTopology& t, std::size_t i) {
  const Edge& e = t.edges[i];
  return t.keypoint_names[e.from] + "-" + t.keypoint_names[e.to];
}

// Annotation file -> average pose, or the built-in template.
Pose average_pose_from(const std::string& annotations, const std::string& normalization,
                       std::ostream& out) {
  if (annotations.empty()) return synthetic_template_pose();
  const AnnotationSet set = load_coco_annotations(annotations);
  const auto norm = normalization == "none" ? AverageNormalization::kNone : AverageNormalization::kTorso;
  std::size_t full = 0;
  for (const Instance& inst : set.instances) full += inst.pose.fully_labeled() ? 1 : 0;
  out << "# annotations: " << set.instances.size() << " person instances, " << full
      << " fully labeled\n";
  return compute_average_pose(set.poses(), norm);
}

struct WeightsArgs {
  std::string annotations;
  std::string scheme;
  std::string normalization = "torso";
  std::string out;
};

int cmd_weights(const WeightsArgs& a, std::ostream& out) {
  const SkeletonTopology topo = build_coco_skeleton();
  const Pose avg = average_pose_from(a.annotations, a.normalization, out);
  if (a.annotations.empty()) out << "# average pose: built-in synthetic template\n";
  const WeightScheme scheme = parse_weight_scheme(a.scheme);
  const std::vector<double> raw = raw_edge_weights(avg, topo, scheme);
  const EdgeWeights w = compute_edge_weights(avg, topo, scheme);

  out << "# scheme " << scheme_number(scheme) << " (" << to_string(scheme) << ")\n";
  out << "# edge name lambda_raw lambda\n";
  for (std::size_t i = 0; i < topo.num_edges(); ++i) {
    char line[160];
    std::snprintf(line, sizeof line, "%2zu %-28s %.6f %.6f\n", i, edge_name(topo, i).c_str(),
                  raw[i], w.lambdas[i]);
    out << line;
  }

  out << "# mirror classes\n";
  std::vector<bool> listed(topo.num_edges(), false);
  for (const auto& [l, r] : topo.symmetric_pairs) {
    char line[200];
    std::snprintf(line, sizeof line, "%-28s | %-28s %.6f\n", edge_name(topo, l).c_str(),
                  edge_name(topo, r).c_str(), w.lambdas[l]);
    out << line;
    listed[l] = listed[r] = true;
  }
  for (std::size_t i = 0; i < topo.num_edges(); ++i) {
    if (listed[i]) continue;
    char line[200];
    std::snprintf(line, sizeof line, "%-28s | %-28s %.6f\n", edge_name(topo, i).c_str(), "(self)",
                  w.lambdas[i]);
    out << line;
  }
  if (!a.out.empty()) save_weights(a.out, topo, w);
  return 0;
}

// A --gt file may be a COCO annotation file or a results list.
std::vector<Pose> load_poses(const std::string& path) {
  const std::string text = read_text_file(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') return parse_coco_annotations(text).poses();
  std::vector<Pose> poses;
  for (const Prediction& p : parse_results(text)) poses.push_back(p.pose);
  return poses;
}

struct LossArgs {
  std::string pred;
  std::string gt;
  std::string weights;
  std::string pred_heatmap;
  std::string target_heatmap;
};

int cmd_loss(const LossArgs& a, std::ostream& out) {
  SkeletonTopology topo;
  EdgeWeights w;
  load_weights(a.weights, topo, w);
  const std::vector<Pose> preds = load_poses(a.pred);
  const std::vector<Pose> gts = load_poses(a.gt);
  if (preds.size() != gts.size()) {
    throw InvalidArgument("instance count mismatch: " + std::to_string(preds.size()) +
                          " predictions vs " + std::to_string(gts.size()) + " ground truths");
  }
  double total = 0.0, length = 0.0, angle = 0.0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const LossValue v = constraint_loss(preds[i], gts[i], w, topo);
    out << "instance " << i << " total " << fmt("%.10g", v.total) << " length_term "
        << fmt("%.10g", v.length_term) << " angle_term " << fmt("%.10g", v.angle_term)
        << " active_edges " << v.active_edges << "\n";
    total += v.total;
    length += v.length_term;
    angle += v.angle_term;
  }
  out << "aggregate total " << fmt("%.10g", total) << " length_term " << fmt("%.10g", length)
      << " angle_term " << fmt("%.10g", angle) << " instances " << preds.size() << "\n";
  if (!a.pred_heatmap.empty()) {
    const double mse = heatmap_mse(read_heatmap(a.pred_heatmap), read_heatmap(a.target_heatmap));
    out << "heatmap_mse " << fmt("%.10g", mse) << "\n";
    out << "combined " << fmt("%.10g", combined_loss(mse, total)) << "\n";
  }
  return 0;
}

struct EvalArgs {
  std::string preds;
  std::string gts;
  std::string out;
};

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  const std::vector<Prediction> preds = load_results(a.preds);
  const AnnotationSet set = load_coco_annotations(a.gts);
  const EvalResult r = evaluate(preds, set.ground_truths());
  out << "AP " << fmt("%.6f", r.ap) << "\n"
      << "AP50 " << fmt("%.6f", r.ap50) << "\n"
      << "AP75 " << fmt("%.6f", r.ap75) << "\n"
      << "APm " << fmt("%.6f", r.ap_medium) << "\n"
      << "APl " << fmt("%.6f", r.ap_large) << "\n"
      << "AR50 " << fmt("%.6f", r.ar50) << "\n";
  nlohmann::json j = {{"ap", r.ap},          {"ap50", r.ap50},
                      {"ap75", r.ap75},      {"ap_medium", r.ap_medium},
                      {"ap_large", r.ap_large}, {"ar50", r.ar50},
                      {"thresholds", r.thresholds}, {"ap_per_threshold", r.ap_per_threshold}};
  if (a.out.empty()) {
    out << j.dump() << "\n";
  } else {
    write_text_file(a.out, j.dump(2) + "\n");
  }
  return 0;
}

struct DecodeArgs {
  std::string heatmap;
  std::string mode = "argmax";
  bool no_subpixel = false;
  double temperature = 1.0;
  std::size_t n = 30;
  std::size_t nms_radius = 2;
  double score_floor = 0.1;
  std::string tag_map;
  double tag_threshold = 1.0;
  std::int64_t image_id = 0;
  std::string out;
};

int cmd_decode(const DecodeArgs& a, std::ostream& out) {
  const Heatmap hm = read_heatmap(a.heatmap);
  std::vector<Prediction> results;
  auto mean_conf = [](const Pose& p) {
    double s = 0.0;
    for (const Joint& j : p.joints) s += j.confidence;
    return p.size() ? s / static_cast<double>(p.size()) : 0.0;
  };
  if (a.mode == "argmax") {
    const Pose p = decode_argmax(hm, ArgmaxOptions{!a.no_subpixel, a.score_floor});
    results.push_back({a.image_id, p, mean_conf(p)});
  } else if (a.mode == "soft") {
    const Pose p = decode_soft_argmax(hm, a.temperature);
    results.push_back({a.image_id, p, mean_conf(p)});
  } else {
    TopNOptions opt{a.n, a.nms_radius, a.score_floor, !a.no_subpixel};
    const auto cands = a.tag_map.empty() ? decode_topn(hm, opt)
                                         : decode_topn(hm, read_heatmap(a.tag_map), opt);
    for (const PersonGroup& g : group_by_tags(cands, a.tag_threshold)) {
      results.push_back({a.image_id, g.pose, mean_conf(g.pose)});
    }
  }
  out << "decoded " << results.size() << " pose(s) from " << hm.width() << "x" << hm.height()
      << "x" << hm.channels() << " heatmap\n";
  if (a.out.empty()) {
    out << format_results(results);
  } else {
    save_results(a.out, results);
  }
  return 0;
}

struct RefineArgs {
  std::string heatmap;
  std::string init;
  std::size_t index = 0;
  std::string weights;
  std::string annotations;
  std::string prior = "average";
  bool length_only = false;
  RefineConfig cfg;
  std::string out;
};

int cmd_refine(const RefineArgs& a, std::ostream& out) {
  const Heatmap hm = read_heatmap(a.heatmap);
  const std::vector<Prediction> inits = load_results(a.init);
  if (a.index >= inits.size()) throw InvalidArgument("--index is past the end of the init file");
  SkeletonTopology topo;
  EdgeWeights w;
  load_weights(a.weights, topo, w);
  const Pose avg = average_pose_from(a.annotations, "torso", out);

  RefineConfig cfg = a.cfg;
  cfg.prior = a.prior == "none" ? PriorKind::kNone : PriorKind::kAveragePoseScaled;
  cfg.terms = ConstraintTerms{true, !a.length_only};
  const RefineResult r = refine_pose(inits[a.index].pose, hm, topo, w, avg, cfg);
  for (const auto& warning : r.warnings) out << "warning: " << warning << "\n";
  out << "iterations " << r.iterations << " objective " << fmt("%.10g", r.trace.front()) << " -> "
      << fmt("%.10g", r.trace.back()) << "\n";
  const std::vector<Prediction> result{{inits[a.index].image_id, r.pose, inits[a.index].score}};
  if (a.out.empty()) {
    out << format_results(result);
  } else {
    save_results(a.out, result);
  }
  return 0;
}

struct RenderArgs {
  std::string poses;
  std::size_t index = 0;
  std::size_t width = 192;
  std::size_t height = 256;
  double sigma = 2.0;
  std::string out;
};

int cmd_render(const RenderArgs& a, std::ostream& out) {
  const std::vector<Pose> poses = load_poses(a.poses);
  if (a.index >= poses.size()) throw InvalidArgument("--index is past the end of the pose file");
  const HeatmapTarget t = render_gaussian_target(poses[a.index], a.width, a.height, a.sigma);
  for (std::size_t k : t.off_grid_keypoints) {
    out << "warning: keypoint " << k << " lies outside the grid\n";
  }
  write_heatmap(a.out, t.heatmap);
  out << "wrote " << a.width << "x" << a.height << "x" << t.heatmap.channels() << " heatmap\n";
  return 0;
}

struct SynthArgs {
  SynthConfig cfg;
  std::string scheme = "3";
  std::string annotations;
  std::string out;
};

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  SynthConfig cfg = a.cfg;
  cfg.scheme = parse_weight_scheme(a.scheme);
  const Pose avg = average_pose_from(a.annotations, "torso", out);
  const SynthReport report = run_synthetic_experiment(cfg, avg);
  out << format_summary(report);
  if (!a.out.empty()) {
    std::filesystem::create_directories(a.out);
    const std::filesystem::path dir(a.out);
    write_text_file(dir / "trials.csv", format_trials_csv(report));
    write_text_file(dir / "summary.dat", format_plot_data(report));
    write_text_file(dir / "summary.txt", format_summary(report));
    out << "wrote " << (dir / "trials.csv").string() << ", summary.dat, summary.txt\n";
  }
  return 0;
}

void add_refine_options(CLI::App* sub, RefineConfig& cfg) {
  sub->add_option("--steps", cfg.steps, "Maximum accepted descent steps")->capture_default_str();
  sub->add_option("--step-size", cfg.step_size, "Initial step length per iteration")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--tol", cfg.convergence_tol, "Stop when the objective drops by less")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--confidence-floor", cfg.confidence_floor,
                  "Joints at or above this confidence anchor the prior")
      ->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"skelcst: skeleton structure constraints for keypoint pose estimation"};
  app.name("skelcst");
  app.require_subcommand(1);

  WeightsArgs wa;
  auto* weights = app.add_subcommand("weights", "Average pose and per-edge lambda weights");
  weights->add_option("--annotations", wa.annotations, "COCO keypoint annotation JSON")
      ->check(CLI::ExistingFile);
  weights->add_option("--scheme", wa.scheme, "1 = uniform, 2 = inverse length, 3 = proportional length")
      ->required()
      ->check(CLI::IsMember({"1", "2", "3"}));
  weights->add_option("--normalization", wa.normalization, "Average-pose normalization")
      ->check(CLI::IsMember({"torso", "none"}))
      ->capture_default_str();
  weights->add_option("--out", wa.out, "Write the weights text file here");

  LossArgs la;
  auto* loss = app.add_subcommand("loss", "Structure loss between predicted and ground-truth poses");
  loss->add_option("--pred", la.pred, "Predicted poses (results JSON)")->required()->check(CLI::ExistingFile);
  loss->add_option("--gt", la.gt, "Ground truth (results JSON or COCO annotations)")
      ->required()
      ->check(CLI::ExistingFile);
  loss->add_option("--weights", la.weights, "Weights text file")->required()->check(CLI::ExistingFile);
  auto* ph = loss->add_option("--pred-heatmap", la.pred_heatmap, "Predicted SKHM heatmap")
                 ->check(CLI::ExistingFile);
  auto* th = loss->add_option("--target-heatmap", la.target_heatmap, "Target SKHM heatmap")
                 ->check(CLI::ExistingFile);
  ph->needs(th);
  th->needs(ph);

  EvalArgs ea;
  auto* eval = app.add_subcommand("eval", "OKS-based AP/AR against COCO annotations");
  eval->add_option("--preds", ea.preds, "Results JSON")->required()->check(CLI::ExistingFile);
  eval->add_option("--gts", ea.gts, "COCO keypoint annotation JSON")->required()->check(CLI::ExistingFile);
  eval->add_option("--out", ea.out, "Write metrics JSON here");

  DecodeArgs da;
  auto* decode = app.add_subcommand("decode", "Decode keypoints from an SKHM heatmap");
  decode->add_option("--heatmap", da.heatmap, "SKHM heatmap")->required()->check(CLI::ExistingFile);
  decode->add_option("--mode", da.mode, "argmax, soft or topn")
      ->check(CLI::IsMember({"argmax", "soft", "topn"}))
      ->capture_default_str();
  decode->add_flag("--no-subpixel", da.no_subpixel, "Disable the quarter-pixel shift");
  decode->add_option("--temperature", da.temperature, "Soft-argmax temperature")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  decode->add_option("--n", da.n, "Top-N candidates per channel")->check(CLI::PositiveNumber)->capture_default_str();
  decode->add_option("--nms-radius", da.nms_radius, "Chebyshev NMS radius")->capture_default_str();
  decode->add_option("--score-floor", da.score_floor, "Minimum peak score")->capture_default_str();
  decode->add_option("--tag-map", da.tag_map, "SKHM associative-embedding tag map")->check(CLI::ExistingFile);
  decode->add_option("--tag-threshold", da.tag_threshold, "Grouping tag distance")->capture_default_str();
  decode->add_option("--image-id", da.image_id, "image_id written to the results")->capture_default_str();
  decode->add_option("--out", da.out, "Write results JSON here");

  RefineArgs ra;
  auto* refine = app.add_subcommand("refine", "Structure-guided refinement of a decoded pose");
  refine->add_option("--heatmap", ra.heatmap, "SKHM heatmap")->required()->check(CLI::ExistingFile);
  refine->add_option("--init", ra.init, "Initial pose (results JSON)")->required()->check(CLI::ExistingFile);
  refine->add_option("--index", ra.index, "Which pose of --init to refine")->capture_default_str();
  refine->add_option("--weights", ra.weights, "Weights text file")->required()->check(CLI::ExistingFile);
  refine->add_option("--annotations", ra.annotations, "Average pose source; template when omitted")
      ->check(CLI::ExistingFile);
  refine->add_option("--prior", ra.prior, "average or none")
      ->check(CLI::IsMember({"average", "none"}))
      ->capture_default_str();
  refine->add_option("--structure-weight", ra.cfg.structure_weight, "Weight of the structure term")
      ->capture_default_str();
  refine->add_flag("--length-only", ra.length_only, "Drop the angle term");
  add_refine_options(refine, ra.cfg);
  refine->add_option("--out", ra.out, "Write results JSON here");

  RenderArgs rna;
  auto* render = app.add_subcommand("render", "Render Gaussian target heatmaps for a pose");
  render->add_option("--poses", rna.poses, "Results JSON or COCO annotations")
      ->required()
      ->check(CLI::ExistingFile);
  render->add_option("--index", rna.index, "Which pose to render")->capture_default_str();
  render->add_option("--width", rna.width, "Grid width")->check(CLI::PositiveNumber)->capture_default_str();
  render->add_option("--height", rna.height, "Grid height")->check(CLI::PositiveNumber)->capture_default_str();
  render->add_option("--sigma", rna.sigma, "Gaussian sigma, px")->check(CLI::PositiveNumber)->capture_default_str();
  render->add_option("--out", rna.out, "SKHM output path")->required();

  SynthArgs sa;
  auto* synth = app.add_subcommand("synth", "Synthetic occlusion experiment with plot data");
  synth->add_option("--persons", sa.cfg.persons, "Persons per trial")->check(CLI::PositiveNumber)->capture_default_str();
  synth->add_option("--noise", sa.cfg.noise_px, "Peak displacement std-dev, px")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  synth->add_flag("--occlude-limb", sa.cfg.occlude_limb, "Blank one random limb's channels");
  synth->add_option("--trials", sa.cfg.trials, "Monte-Carlo trials")->check(CLI::PositiveNumber)->capture_default_str();
  synth->add_option("--seed", sa.cfg.seed, "PRNG seed")->capture_default_str();
  synth->add_option("--structure-weight", sa.cfg.structure_weight, "Weight of the structure term")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  synth->add_option("--scheme", sa.scheme, "Lambda scheme 1, 2 or 3")
      ->check(CLI::IsMember({"1", "2", "3"}))
      ->capture_default_str();
  synth->add_option("--jitter", sa.cfg.pose_jitter_px, "Per-joint deviation from the template, px")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  synth->add_option("--threads", sa.cfg.threads, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  synth->add_option("--annotations", sa.annotations, "Average pose source; template when omitted")
      ->check(CLI::ExistingFile);
  add_refine_options(synth, sa.cfg.refine);
  synth->add_option("--out", sa.out, "Directory for trials.csv, summary.dat, summary.txt");

  std::vector<std::string> argv_store{"skelcst"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : argv_store) argv.push_back(s.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (weights->parsed()) return cmd_weights(wa, out);
    if (loss->parsed()) return cmd_loss(la, out);
    if (eval->parsed()) return cmd_eval(ea, out);
    if (decode->parsed()) return cmd_decode(da, out);
    if (refine->parsed()) return cmd_refine(ra, out);
    if (render->parsed()) return cmd_render(rna, out);
    if (synth->parsed()) return cmd_synth(sa, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace skelcst::cli
