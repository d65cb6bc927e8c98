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

#include "skelcst/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "json.hpp"

namespace skelcst {

using nlohmann::json;

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

namespace {

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what(), e.byte);
  }
}

const json& require_array(const json& root, const char* key) {
  auto it = root.find(key);
  if (it == root.end() || !it->is_array()) {
    throw ParseError(std::string("annotation file lacks a '") + key + "' array");
  }
  return *it;
}

std::int64_t require_int(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_number_integer()) {
    throw ParseError(where + ": missing integer field '" + key + "'");
  }
  return it->get<std::int64_t>();
}

double require_number(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_number()) {
    throw ParseError(where + ": missing numeric field '" + key + "'");
  }
  return it->get<double>();
}

}  // namespace

std::vector<GroundTruth> AnnotationSet::ground_truths() const {
  std::vector<GroundTruth> out;
  out.reserve(instances.size());
  for (const Instance& inst : instances) out.push_back({inst.image_id, inst.pose, inst.area});
  return out;
}

std::vector<Pose> AnnotationSet::poses() const {
  std::vector<Pose> out;
  out.reserve(instances.size());
  for (const Instance& inst : instances) out.push_back(inst.pose);
  return out;
}

AnnotationSet parse_coco_annotations(const std::string& json_text, std::size_t num_keypoints) {
  const json root = parse_json(json_text);
  if (!root.is_object()) throw ParseError("annotation file root is not an object");
  const json& images = require_array(root, "images");
  const json& annotations = require_array(root, "annotations");
  const json& categories = require_array(root, "categories");

  std::set<std::int64_t> person_ids;
  for (const json& c : categories) {
    if (c.is_object() && c.value("name", std::string{}) == "person") {
      person_ids.insert(require_int(c, "id", "category"));
    }
  }

  AnnotationSet set;
  std::set<std::int64_t> image_ids;
  for (const json& img : images) {
    if (!img.is_object()) throw ParseError("image entry is not an object");
    ImageInfo info;
    info.id = require_int(img, "id", "image");
    info.width = img.value("width", std::int64_t{0});
    info.height = img.value("height", std::int64_t{0});
    image_ids.insert(info.id);
    set.images.push_back(info);
  }

  for (const json& ann : annotations) {
    if (!ann.is_object()) throw ParseError("annotation entry is not an object");
    const std::int64_t id = require_int(ann, "id", "annotation");
    const std::string where = "annotation " + std::to_string(id);
    if (person_ids.count(require_int(ann, "category_id", where)) == 0) continue;

    Instance inst;
    inst.id = id;
    inst.image_id = require_int(ann, "image_id", where);
    if (image_ids.count(inst.image_id) == 0) {
      throw ParseError(where + ": image_id " + std::to_string(inst.image_id) + " is not listed");
    }
    auto kp = ann.find("keypoints");
    if (kp == ann.end() || !kp->is_array()) throw ParseError(where + ": missing keypoints array");
    if (kp->size() != 3 * num_keypoints) {
      throw ParseError(where + ": keypoints has " + std::to_string(kp->size()) +
                       " values, expected " + std::to_string(3 * num_keypoints));
    }
    inst.pose = Pose(num_keypoints);
    for (std::size_t k = 0; k < num_keypoints; ++k) {
      const json& x = (*kp)[3 * k];
      const json& y = (*kp)[3 * k + 1];
      const json& v = (*kp)[3 * k + 2];
      if (!x.is_number() || !y.is_number() || !v.is_number()) {
        throw ParseError(where + ": keypoint " + std::to_string(k) + " is not numeric");
      }
      const double vf = v.get<double>();
      if (vf != 0.0 && vf != 1.0 && vf != 2.0) {
        throw ParseError(where + ": keypoint " + std::to_string(k) +
                         " has visibility outside {0, 1, 2}");
      }
      const int flag = static_cast<int>(vf);
      inst.pose[k] = Joint{{x.get<double>(), y.get<double>()}, static_cast<Visibility>(flag),
                           flag > 0 ? 1.0 : 0.0};
    }
    inst.area = ann.contains("area") ? require_number(ann, "area", where) : 0.0;
    if (auto bb = ann.find("bbox"); bb != ann.end()) {
      if (!bb->is_array() || bb->size() != 4) throw ParseError(where + ": bbox must have 4 values");
      for (const json& b : *bb) {
        if (!b.is_number()) throw ParseError(where + ": bbox value is not numeric");
        inst.bbox.push_back(b.get<double>());
      }
    }
    set.instances.push_back(std::move(inst));
  }
  return set;
}

AnnotationSet load_coco_annotations(const std::filesystem::path& path, std::size_t num_keypoints) {
  return parse_coco_annotations(read_text_file(path), num_keypoints);
}

std::string format_results(const std::vector<Prediction>& results, std::int64_t category_id) {
  json arr = json::array();
  for (std::size_t i = 0; i < results.size(); ++i) {
    const Prediction& r = results[i];
    json kp = json::array();
    json vis = json::array();
    for (std::size_t k = 0; k < r.pose.size(); ++k) {
      const Joint& j = r.pose[k];
      if (!is_finite(j.position) || !std::isfinite(j.confidence)) {
        throw InvalidArgument("result " + std::to_string(i) + " keypoint " + std::to_string(k) +
                              " is not finite");
      }
      kp.push_back(j.position.x);
      kp.push_back(j.position.y);
      kp.push_back(j.confidence);
      vis.push_back(static_cast<int>(j.visibility));
    }
    if (!std::isfinite(r.score)) throw InvalidArgument("result " + std::to_string(i) + " score is not finite");
    arr.push_back({{"image_id", r.image_id},
                   {"category_id", category_id},
                   {"keypoints", std::move(kp)},
                   {"visibility", std::move(vis)},
                   {"score", r.score}});
  }
  return arr.dump(1) + "\n";
}

std::vector<Prediction> parse_results(const std::string& json_text) {
  const json root = parse_json(json_text);
  if (!root.is_array()) throw ParseError("results file root is not an array");
  std::vector<Prediction> out;
  out.reserve(root.size());
  std::optional<std::int64_t> category;
  for (std::size_t i = 0; i < root.size(); ++i) {
    const json& e = root[i];
    const std::string where = "result " + std::to_string(i);
    if (!e.is_object()) throw ParseError(where + ": not an object");
    const std::int64_t cat = require_int(e, "category_id", where);
    if (category && *category != cat) {
      throw ParseError(where + ": category_id " + std::to_string(cat) +
                       " differs from earlier results (" + std::to_string(*category) + ")");
    }
    category = cat;

    Prediction p;
    p.image_id = require_int(e, "image_id", where);
    p.score = require_number(e, "score", where);
    auto kp = e.find("keypoints");
    if (kp == e.end() || !kp->is_array() || kp->size() % 3 != 0) {
      throw ParseError(where + ": keypoints must be an array of 3K numbers");
    }
    const std::size_t k = kp->size() / 3;
    const json* vis = nullptr;
    if (auto v = e.find("visibility"); v != e.end()) {
      if (!v->is_array() || v->size() != k) {
        throw ParseError(where + ": visibility must have one entry per keypoint");
      }
      vis = &*v;
    }
    p.pose = Pose(k);
    for (std::size_t j = 0; j < k; ++j) {
      const json& x = (*kp)[3 * j];
      const json& y = (*kp)[3 * j + 1];
      const json& c = (*kp)[3 * j + 2];
      if (!x.is_number() || !y.is_number() || !c.is_number()) {
        throw ParseError(where + ": keypoint " + std::to_string(j) + " is not numeric");
      }
      Visibility flag = Visibility::kLabeledVisible;
      if (vis != nullptr) {
        const json& f = (*vis)[j];
        if (!f.is_number_integer() || f.get<int>() < 0 || f.get<int>() > 2) {
          throw ParseError(where + ": keypoint " + std::to_string(j) +
                           " has visibility outside {0, 1, 2}");
        }
        flag = static_cast<Visibility>(f.get<int>());
      }
      const double conf = c.get<double>();
      if (!(conf >= 0.0 && conf <= 1.0)) {
        throw ParseError(where + ": keypoint " + std::to_string(j) + " confidence outside [0, 1]");
      }
      p.pose[j] = Joint{{x.get<double>(), y.get<double>()}, flag, conf};
    }
    out.push_back(std::move(p));
  }
  return out;
}

void save_results(const std::filesystem::path& path, const std::vector<Prediction>& results,
                  std::int64_t category_id) {
  write_text_file(path, format_results(results, category_id));
}

std::vector<Prediction> load_results(const std::filesystem::path& path) {
  return parse_results(read_text_file(path));
}

namespace {

constexpr char kMagic[4] = {'S', 'K', 'H', 'M'};
constexpr std::size_t kHeaderSize = 4 + 2 + 3 * 4;

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int s = 0; s < 32; s += 8) out.push_back(static_cast<std::uint8_t>((v >> s) & 0xff));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace

std::vector<std::uint8_t> encode_heatmap(const Heatmap& hm) {
  constexpr std::uint64_t kMax = 0xffffffffu;
  if (hm.width() > kMax || hm.height() > kMax || hm.channels() > kMax) {
    throw InvalidArgument("heatmap dimensions exceed the 32-bit header fields");
  }
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderSize + 4 * hm.data().size());
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  put_u16(out, kHeatmapFormatVersion);
  put_u32(out, static_cast<std::uint32_t>(hm.width()));
  put_u32(out, static_cast<std::uint32_t>(hm.height()));
  put_u32(out, static_cast<std::uint32_t>(hm.channels()));
  for (float v : hm.data()) put_u32(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

Heatmap decode_heatmap(const std::vector<std::uint8_t>& bytes) {
  using Kind = HeatmapFormatError::Kind;
  if (bytes.size() < 4) throw HeatmapFormatError(Kind::kTruncated, "heatmap file truncated in magic");
  if (!std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin())) {
    throw HeatmapFormatError(Kind::kBadMagic, "heatmap file does not start with 'SKHM'");
  }
  if (bytes.size() < 6) throw HeatmapFormatError(Kind::kTruncated, "heatmap file truncated in version");
  const std::uint16_t version = static_cast<std::uint16_t>(bytes[4] | (bytes[5] << 8));
  if (version != kHeatmapFormatVersion) {
    throw HeatmapFormatError(Kind::kBadVersion,
                             "unsupported heatmap format version " + std::to_string(version));
  }
  if (bytes.size() < kHeaderSize) {
    throw HeatmapFormatError(Kind::kTruncated, "heatmap file truncated in header");
  }
  const std::uint64_t w = get_u32(&bytes[6]);
  const std::uint64_t h = get_u32(&bytes[10]);
  const std::uint64_t k = get_u32(&bytes[14]);
  const std::uint64_t count = w * h * k;
  const std::uint64_t expected = kHeaderSize + 4 * count;
  if (bytes.size() < expected) {
    throw HeatmapFormatError(Kind::kTruncated, "heatmap file truncated: expected " +
                                                   std::to_string(expected) + " bytes, have " +
                                                   std::to_string(bytes.size()));
  }
  if (bytes.size() > expected) {
    throw HeatmapFormatError(Kind::kTrailingData, "heatmap file has " +
                                                      std::to_string(bytes.size() - expected) +
                                                      " trailing bytes");
  }
  Heatmap hm(w, h, k);
  for (std::uint64_t i = 0; i < count; ++i) {
    hm.data()[i] = std::bit_cast<float>(get_u32(&bytes[kHeaderSize + 4 * i]));
  }
  return hm;
}

void write_heatmap(const std::filesystem::path& path, const Heatmap& hm) {
  const auto bytes = encode_heatmap(hm);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw HeatmapFormatError(HeatmapFormatError::Kind::kOpenFailed, "cannot write '" + path.string() + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

Heatmap read_heatmap(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw HeatmapFormatError(HeatmapFormatError::Kind::kOpenFailed, "cannot open '" + path.string() + "'");
  }
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_heatmap(bytes);
}

namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

std::pair<std::size_t, std::size_t> parse_index_pair(const std::string& tok, const std::string& key) {
  const auto dash = tok.find('-');
  if (dash == std::string::npos) throw ParseError("weights: bad " + key + " entry '" + tok + "'");
  std::size_t a = 0, b = 0;
  const char* s = tok.data();
  auto r1 = std::from_chars(s, s + dash, a);
  auto r2 = std::from_chars(s + dash + 1, s + tok.size(), b);
  if (r1.ec != std::errc{} || r1.ptr != s + dash || r2.ec != std::errc{} || r2.ptr != s + tok.size()) {
    throw ParseError("weights: bad " + key + " entry '" + tok + "'");
  }
  return {a, b};
}

}  // namespace

std::string format_weights(const SkeletonTopology& topology, const EdgeWeights& weights) {
  std::ostringstream out;
  out << "# skeleton edge weights\n";
  out << "format = skelcst-weights-1\n";
  out << "scheme = " << to_string(weights.scheme) << "\n";
  out << "keypoints =";
  for (const auto& n : topology.keypoint_names) out << ' ' << n;
  out << "\nedges =";
  for (const Edge& e : topology.edges) out << ' ' << e.from << '-' << e.to;
  out << "\nsymmetric_pairs =";
  for (const auto& [a, b] : topology.symmetric_pairs) out << ' ' << a << '-' << b;
  out << "\nlambdas =";
  for (double l : weights.lambdas) out << ' ' << format_double(l);
  out << "\n";
  return out.str();
}

void parse_weights(const std::string& text, SkeletonTopology& topology, EdgeWeights& weights) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError("weights line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    std::string key = line.substr(0, eq);
    key.erase(key.find_last_not_of(" \t") + 1);
    key.erase(0, key.find_first_not_of(" \t"));
    if (!kv.emplace(key, line.substr(eq + 1)).second) {
      throw ParseError("weights line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
  }
  static const std::set<std::string> kKnown = {"format", "scheme", "keypoints", "edges",
                                               "symmetric_pairs", "lambdas"};
  for (const auto& [key, value] : kv) {
    if (kKnown.count(key) == 0) throw ParseError("weights: unknown key '" + key + "'");
  }
  for (const char* key : {"format", "scheme", "keypoints", "edges", "lambdas"}) {
    if (kv.count(key) == 0) throw ParseError(std::string("weights: missing key '") + key + "'");
  }
  const auto format = split_ws(kv["format"]);
  if (format.size() != 1 || format[0] != "skelcst-weights-1") {
    throw ParseError("weights: unsupported format '" + kv["format"] + "'");
  }

  SkeletonTopology t;
  t.keypoint_names = split_ws(kv["keypoints"]);
  for (const auto& tok : split_ws(kv["edges"])) {
    const auto [a, b] = parse_index_pair(tok, "edges");
    t.edges.push_back({a, b});
  }
  for (const auto& tok : split_ws(kv["symmetric_pairs"])) {
    t.symmetric_pairs.push_back(parse_index_pair(tok, "symmetric_pairs"));
  }
  try {
    validate_topology(t);
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("weights: ") + e.what());
  }

  EdgeWeights w;
  const auto scheme = split_ws(kv["scheme"]);
  if (scheme.size() != 1) throw ParseError("weights: bad scheme");
  try {
    w.scheme = parse_weight_scheme(scheme[0]);
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("weights: ") + e.what());
  }
  for (const auto& tok : split_ws(kv["lambdas"])) {
    double v = 0.0;
    const auto [end, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || end != tok.data() + tok.size() || !std::isfinite(v) || v < 0.0) {
      throw ParseError("weights: bad lambda '" + tok + "'");
    }
    w.lambdas.push_back(v);
  }
  if (w.lambdas.size() != t.edges.size()) {
    throw ParseError("weights: " + std::to_string(w.lambdas.size()) + " lambdas for " +
                     std::to_string(t.edges.size()) + " edges");
  }
  topology = std::move(t);
  weights = std::move(w);
}

void save_weights(const std::filesystem::path& path, const SkeletonTopology& topology,
                  const EdgeWeights& weights) {
  write_text_file(path, format_weights(topology, weights));
}

void load_weights(const std::filesystem::path& path, SkeletonTopology& topology,
                  EdgeWeights& weights) {
  parse_weights(read_text_file(path), topology, weights);
}

}  // namespace skelcst
