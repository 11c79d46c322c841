// Copyright (c) 2026, The monoflex-geom Authors.
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

#include "commands.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ensemble_study.hpp"
#include "monoflex/decode.hpp"
#include "monoflex/errors.hpp"
#include "monoflex/eval3d.hpp"
#include "monoflex/kitti.hpp"
#include "parallel.hpp"

namespace monoflex::tools {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json parse_json_object(std::string_view text, std::string_view what) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string(what) + ": malformed JSON: " + e.what());
  }
  if (!doc.is_object()) throw ConfigError(std::string(what) + ": expected a JSON object");
  return doc;
}

template <typename T>
T get_as(const json& v, std::string_view key, std::string_view what) {
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string(what) + ": key '" + std::string(key) + "' has the wrong type");
  }
}

std::array<double, 2> get_range(const json& v, std::string_view key, std::string_view what) {
  const auto r = get_as<std::vector<double>>(v, key, what);
  if (r.size() != 2) throw ConfigError(std::string(what) + ": key '" + std::string(key) + "' needs two numbers");
  return {r[0], r[1]};
}

void apply_camera(CameraIntrinsics& K, const json& cam, std::string_view what) {
  if (!cam.is_object()) throw ConfigError(std::string(what) + ": 'camera' must be an object");
  for (const auto& [key, v] : cam.items()) {
    if (key == "fx") K.fx = get_as<double>(v, key, what);
    else if (key == "fy") K.fy = get_as<double>(v, key, what);
    else if (key == "cu") K.cu = get_as<double>(v, key, what);
    else if (key == "cv") K.cv = get_as<double>(v, key, what);
    else if (key == "tx") K.tx = get_as<double>(v, key, what);
    else if (key == "ty") K.ty = get_as<double>(v, key, what);
    else if (key == "image_w") K.image_w = get_as<int>(v, key, what);
    else if (key == "image_h") K.image_h = get_as<int>(v, key, what);
    else throw ConfigError(std::string(what) + ": unknown camera key '" + key + "'");
  }
}

std::string id_path(const std::string& dir, const std::string& id, std::string_view ext) {
  return (fs::path(dir) / (id + std::string(ext))).string();
}

void require_dir(const std::string& dir, std::string_view flag) {
  if (dir.empty()) throw ConfigError("missing required " + std::string(flag));
  if (!fs::is_directory(dir)) throw ConfigError(std::string(flag) + ": directory not found: " + dir);
}

CameraIntrinsics load_calib(const RunConfig& rc, const std::string& id) {
  const std::string path = id_path(rc.calib_dir, id, ".txt");
  try {
    return parse_calib(read_file(path), rc.image_w, rc.image_h);
  } catch (const ParseError& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

std::vector<ObjectLabel> load_labels(const std::string& path) {
  try {
    return parse_label_file(read_file(path));
  } catch (const ParseError& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

HeadOutputs load_heads(const std::string& dir, const std::string& id) {
  const std::string bin = id_path(dir, id, ".bin");
  const std::string sidecar = id_path(dir, id, ".json");
  try {
    if (fs::exists(bin)) return head_from_binary(read_file(sidecar), read_file(bin));
    return head_from_json(read_file(sidecar));
  } catch (const ParseError& e) {
    throw std::runtime_error(sidecar + ": " + e.what());
  }
}

ApMode parse_ap_mode(const std::string& s) {
  if (s == "R11") return ApMode::R11;
  if (s == "R40") return ApMode::R40;
  throw ConfigError("eval mode must be R11 or R40, got '" + s + "'");
}

EvalConfig eval_config(const RunConfig& rc) {
  EvalConfig cfg;
  cfg.classes = rc.classes;
  cfg.mode = parse_ap_mode(rc.eval_mode);
  for (const auto& c : rc.classes) {
    if (!cfg.iou_threshold.contains(c)) throw ConfigError("no IoU threshold for class '" + c + "'");
  }
  return cfg;
}

DecodeConfig decode_config(const RunConfig& rc) {
  DecodeConfig cfg;
  cfg.class_names = rc.classes;
  cfg.represent.stride = rc.stride;
  cfg.score_threshold = rc.score_threshold;
  cfg.max_detections = rc.max_detections;
  return cfg;
}

std::uint64_t run_seed(const RunConfig& rc, std::uint64_t fallback) { return rc.seed.value_or(fallback); }

// ---------------------------------------------------------------------------

int cmd_synth(const RunConfig& rc, std::ostream& out) {
  if (rc.out_dir.empty()) throw ConfigError("missing required --out");
  SceneSpec spec;
  if (!rc.spec_file.empty()) spec = scene_spec_from_json(read_file(rc.spec_file));
  spec.seed = run_seed(rc, spec.seed);
  spec.stride = rc.stride;
  spec.validate();

  fs::create_directories(fs::path(rc.out_dir) / "label_2");
  fs::create_directories(fs::path(rc.out_dir) / "calib");
  std::vector<int> counts(static_cast<std::size_t>(rc.scenes), 0);
  parallel_for(counts.size(), rc.jobs, [&](std::size_t i) {
    SceneSpec s = spec;
    s.seed = mix_seed(spec.seed, i);
    const Scene scene = gen_scene(s);
    char id[16];
    std::snprintf(id, sizeof(id), "%06zu", i);
    write_file(id_path((fs::path(rc.out_dir) / "label_2").string(), id, ".txt"), serialize_labels(scene.labels));
    write_file(id_path((fs::path(rc.out_dir) / "calib").string(), id, ".txt"), serialize_calib(scene.calib));
    counts[i] = static_cast<int>(scene.labels.size());
  });
  int total = 0;
  for (int c : counts) total += c;
  out << "synth: " << rc.scenes << " scenes, " << total << " objects -> " << rc.out_dir << "\n";
  return kExitOk;
}

int cmd_encode(const RunConfig& rc, std::ostream& out) {
  require_dir(rc.labels_dir, "--labels");
  require_dir(rc.calib_dir, "--calib");
  if (rc.out_dir.empty()) throw ConfigError("missing required --out");
  std::optional<NoiseSpec> noise;
  if (!rc.noise_file.empty()) noise = noise_spec_from_json(read_file(rc.noise_file));
  const DecodeConfig cfg = decode_config(rc);
  fs::create_directories(rc.out_dir);

  const auto ids = list_ids(rc.labels_dir, ".txt");
  std::vector<EncodeResult> stats(ids.size());
  parallel_for(ids.size(), rc.jobs, [&](std::size_t i) {
    const CameraIntrinsics K = load_calib(rc, ids[i]);
    const auto labels = load_labels(id_path(rc.labels_dir, ids[i], ".txt"));
    EncodeResult res = encode_targets(labels, K, cfg);
    if (noise) {
      NoiseSpec n = *noise;
      n.seed = mix_seed(run_seed(rc, noise->seed), i);
      res.heads = perturb(res.heads, n, K, cfg);
    }
    if (rc.head_format == "json") {
      write_file(id_path(rc.out_dir, ids[i], ".json"), head_to_json(res.heads));
    } else {
      write_file(id_path(rc.out_dir, ids[i], ".json"), head_header_json(res.heads));
      write_file(id_path(rc.out_dir, ids[i], ".bin"), head_to_binary(res.heads));
    }
    res.heads = HeadOutputs();
    stats[i] = std::move(res);
  });
  int encoded = 0, behind = 0, other = 0, collisions = 0;
  for (const auto& s : stats) {
    encoded += s.encoded;
    behind += s.skipped_behind_camera;
    other += s.skipped_other;
    collisions += s.collisions;
  }
  out << "encode: " << ids.size() << " images, " << encoded << " objects encoded, " << behind
      << " behind camera, " << other << " skipped, " << collisions << " collisions -> " << rc.out_dir << "\n";
  return kExitOk;
}

int cmd_decode(const RunConfig& rc, std::ostream& out) {
  require_dir(rc.heads_dir, "--heads");
  require_dir(rc.calib_dir, "--calib");
  if (rc.out_dir.empty()) throw ConfigError("missing required --out");
  DecodeConfig cfg = decode_config(rc);
  std::string strategy;  // non-empty: re-place detections after decoding
  if (rc.ensemble == "soft") {
    cfg.ensemble = EnsembleMode::Soft;
  } else if (rc.ensemble == "hard") {
    cfg.ensemble = EnsembleMode::Hard;
  } else if (rc.ensemble == "oracle") {
    require_dir(rc.labels_dir, "--labels (required by the oracle ensemble)");
    strategy = "oracle";
  } else if (rc.ensemble.starts_with("single:")) {
    cfg.ensemble = EnsembleMode::Single;
    try {
      cfg.single_source = depth_source_from_string(rc.ensemble.substr(7));
    } catch (const std::exception&) {
      throw ConfigError("unknown depth source in --ensemble '" + rc.ensemble + "'");
    }
  } else {
    throw ConfigError("--ensemble must be soft, hard, oracle or single:<source>, got '" + rc.ensemble + "'");
  }
  fs::create_directories(rc.out_dir);

  const auto ids = list_ids(rc.heads_dir, ".json");
  std::vector<int> counts(ids.size(), 0);
  parallel_for(ids.size(), rc.jobs, [&](std::size_t i) {
    const CameraIntrinsics K = load_calib(rc, ids[i]);
    const HeadOutputs ho = load_heads(rc.heads_dir, ids[i]);
    auto dets = decode_detections(ho, K, cfg).detections;
    if (!strategy.empty()) {
      const std::string gt_path = id_path(rc.labels_dir, ids[i], ".txt");
      const auto gt = fs::exists(gt_path) ? load_labels(gt_path) : std::vector<ObjectLabel>{};
      const auto match = match_2d(gt, dets);
      for (std::size_t d = 0; d < dets.size(); ++d) {
        const ObjectLabel* g = match[d] >= 0 ? &gt[static_cast<std::size_t>(match[d])] : nullptr;
        dets[d].z = strategy_depth(dets[d], strategy, g);
        dets[d].box3d = box_at_depth(dets[d], dets[d].z, K, cfg.center);
      }
    }
    std::vector<ObjectLabel> labels;
    labels.reserve(dets.size());
    for (const auto& d : dets) labels.push_back(to_label(d));
    write_file(id_path(rc.out_dir, ids[i], ".txt"), serialize_labels(labels));
    counts[i] = static_cast<int>(labels.size());
  });
  int total = 0;
  for (int c : counts) total += c;
  out << "decode: " << ids.size() << " images, " << total << " detections -> " << rc.out_dir << "\n";
  return kExitOk;
}

int cmd_eval(const RunConfig& rc, std::ostream& out) {
  require_dir(rc.labels_dir, "--labels");
  require_dir(rc.pred_dir, "--pred");
  const EvalConfig cfg = eval_config(rc);
  const auto ids = list_ids(rc.labels_dir, ".txt");
  std::vector<std::vector<ObjectLabel>> gt(ids.size()), det(ids.size());
  parallel_for(ids.size(), rc.jobs, [&](std::size_t i) {
    gt[i] = load_labels(id_path(rc.labels_dir, ids[i], ".txt"));
    const std::string pred = id_path(rc.pred_dir, ids[i], ".txt");
    if (fs::exists(pred)) det[i] = load_labels(pred);
  });
  const EvalResult result = evaluate(gt, det, cfg);
  const std::string text = format_report_text(result);
  out << text;
  if (!rc.out_dir.empty()) {
    fs::create_directories(rc.out_dir);
    write_file((fs::path(rc.out_dir) / "report.txt").string(), text);
    write_file((fs::path(rc.out_dir) / "report.json").string(), format_report_json(result));
  }
  return kExitOk;
}

int cmd_ensemble_report(const RunConfig& rc, std::ostream& out) {
  require_dir(rc.labels_dir, "--labels");
  require_dir(rc.calib_dir, "--calib");
  require_dir(rc.heads_dir, "--heads");
  const EvalConfig eval_cfg = eval_config(rc);
  const DecodeConfig cfg = decode_config(rc);
  const auto ids = list_ids(rc.labels_dir, ".txt");
  std::vector<StudyImage> images(ids.size());
  parallel_for(ids.size(), rc.jobs, [&](std::size_t i) {
    images[i].gt = load_labels(id_path(rc.labels_dir, ids[i], ".txt"));
    images[i].calib = load_calib(rc, ids[i]);
    images[i].detections = study_decode(load_heads(rc.heads_dir, ids[i]), images[i].calib, cfg);
  });
  const StudyResult study = run_ensemble_study(images, cfg, eval_cfg, rc.jobs);
  const std::string text = format_study_text(study, eval_cfg);
  out << text;
  if (!rc.out_dir.empty()) {
    fs::create_directories(rc.out_dir);
    write_file((fs::path(rc.out_dir) / "ensemble_report.txt").string(), text);
    write_file((fs::path(rc.out_dir) / "ensemble_report.json").string(), format_study_json(study, eval_cfg));
  }
  return kExitOk;
}

// Flag values captured by CLI11; set flags override the config file.
struct Flags {
  std::string config;
  std::optional<std::string> labels, calib, heads, pred, out, spec, noise, ensemble, mode, format;
  std::optional<std::vector<std::string>> classes;
  std::optional<int> stride, max_det, image_w, image_h, scenes, jobs;
  std::optional<double> score_threshold;
  std::optional<std::uint64_t> seed;
};

RunConfig resolve(const Flags& f) {
  RunConfig rc;
  if (!f.config.empty()) rc = merge_run_config(rc, read_file(f.config));
  auto set = [](auto& dst, const auto& src) {
    if (src) dst = *src;
  };
  set(rc.labels_dir, f.labels);
  set(rc.calib_dir, f.calib);
  set(rc.heads_dir, f.heads);
  set(rc.pred_dir, f.pred);
  set(rc.out_dir, f.out);
  set(rc.spec_file, f.spec);
  set(rc.noise_file, f.noise);
  set(rc.ensemble, f.ensemble);
  set(rc.eval_mode, f.mode);
  set(rc.head_format, f.format);
  set(rc.classes, f.classes);
  set(rc.stride, f.stride);
  set(rc.max_detections, f.max_det);
  set(rc.image_w, f.image_w);
  set(rc.image_h, f.image_h);
  set(rc.scenes, f.scenes);
  set(rc.jobs, f.jobs);
  set(rc.score_threshold, f.score_threshold);
  if (f.seed) rc.seed = f.seed;
  rc.validate();
  return rc;
}

}  // namespace

void RunConfig::validate() const {
  if (stride < 1) throw ConfigError("stride must be >= 1");
  if (jobs < 1) throw ConfigError("jobs must be >= 1");
  if (scenes < 0) throw ConfigError("scenes must be >= 0");
  if (max_detections < 0) throw ConfigError("max_detections must be >= 0");
  if (image_w < 1 || image_h < 1) throw ConfigError("image size must be positive");
  if (classes.empty()) throw ConfigError("class list is empty");
  if (head_format != "bin" && head_format != "json") throw ConfigError("format must be bin or json");
  parse_ap_mode(eval_mode);
}

RunConfig merge_run_config(RunConfig rc, std::string_view json_text) {
  constexpr std::string_view what = "run config";
  const json doc = parse_json_object(json_text, what);
  for (const auto& [key, v] : doc.items()) {
    if (key == "labels_dir") rc.labels_dir = get_as<std::string>(v, key, what);
    else if (key == "calib_dir") rc.calib_dir = get_as<std::string>(v, key, what);
    else if (key == "heads_dir") rc.heads_dir = get_as<std::string>(v, key, what);
    else if (key == "pred_dir") rc.pred_dir = get_as<std::string>(v, key, what);
    else if (key == "out_dir") rc.out_dir = get_as<std::string>(v, key, what);
    else if (key == "spec") rc.spec_file = get_as<std::string>(v, key, what);
    else if (key == "noise") rc.noise_file = get_as<std::string>(v, key, what);
    else if (key == "stride") rc.stride = get_as<int>(v, key, what);
    else if (key == "score_threshold") rc.score_threshold = get_as<double>(v, key, what);
    else if (key == "max_detections") rc.max_detections = get_as<int>(v, key, what);
    else if (key == "ensemble") rc.ensemble = get_as<std::string>(v, key, what);
    else if (key == "eval_mode") rc.eval_mode = get_as<std::string>(v, key, what);
    else if (key == "classes") rc.classes = get_as<std::vector<std::string>>(v, key, what);
    else if (key == "image_w") rc.image_w = get_as<int>(v, key, what);
    else if (key == "image_h") rc.image_h = get_as<int>(v, key, what);
    else if (key == "seed") rc.seed = get_as<std::uint64_t>(v, key, what);
    else if (key == "scenes") rc.scenes = get_as<int>(v, key, what);
    else if (key == "jobs") rc.jobs = get_as<int>(v, key, what);
    else if (key == "format") rc.head_format = get_as<std::string>(v, key, what);
    else throw ConfigError("run config: unknown key '" + key + "'");
  }
  return rc;
}

SceneSpec scene_spec_from_json(std::string_view json_text) {
  constexpr std::string_view what = "scene spec";
  const json doc = parse_json_object(json_text, what);
  SceneSpec spec;
  for (const auto& [key, v] : doc.items()) {
    if (key == "seed") spec.seed = get_as<std::uint64_t>(v, key, what);
    else if (key == "n_objects") spec.n_objects = get_as<int>(v, key, what);
    else if (key == "class_mix") {
      if (!v.is_object()) throw ConfigError("scene spec: 'class_mix' must map class names to weights");
      spec.class_mix.clear();
      for (const auto& [name, w] : v.items()) spec.class_mix.push_back({name, get_as<double>(w, key, what)});
    } else if (key == "depth_range") spec.depth_range = get_range(v, key, what);
    else if (key == "height_range") spec.height_range = get_range(v, key, what);
    else if (key == "dim_jitter") spec.dim_jitter = get_as<double>(v, key, what);
    else if (key == "truncation_fraction") spec.truncation_fraction = get_as<double>(v, key, what);
    else if (key == "attempt_budget") spec.attempt_budget = get_as<int>(v, key, what);
    else if (key == "camera") apply_camera(spec.camera, v, what);
    else throw ConfigError("scene spec: unknown key '" + key + "'");
  }
  try {
    spec.validate();
  } catch (const PreconditionError& e) {
    throw ConfigError(std::string("scene spec: ") + e.what());
  }
  return spec;
}

NoiseSpec noise_spec_from_json(std::string_view json_text) {
  constexpr std::string_view what = "noise spec";
  const json doc = parse_json_object(json_text, what);
  NoiseSpec n;
  for (const auto& [key, v] : doc.items()) {
    if (key == "seed") n.seed = get_as<std::uint64_t>(v, key, what);
    else if (key == "offset_std") n.offset_std = get_as<double>(v, key, what);
    else if (key == "box2d_std") n.box2d_std = get_as<double>(v, key, what);
    else if (key == "dim_std") n.dim_std = get_as<double>(v, key, what);
    else if (key == "orient_std") n.orient_std = get_as<double>(v, key, what);
    else if (key == "keypoint_std") {
      const auto k = get_as<std::vector<double>>(v, key, what);
      if (k.size() != 3) throw ConfigError("noise spec: 'keypoint_std' needs three numbers");
      n.keypoint_std = {k[0], k[1], k[2]};
    } else if (key == "depth_std") n.depth_std = get_as<double>(v, key, what);
    else if (key == "scale_range") {
      const auto r = get_range(v, key, what);
      n.scale_lo = r[0];
      n.scale_hi = r[1];
    } else if (key == "honest_sigma") n.honest_sigma = get_as<bool>(v, key, what);
    else if (key == "min_heat") n.min_heat = get_as<double>(v, key, what);
    else throw ConfigError("noise spec: unknown key '" + key + "'");
  }
  if (n.scale_lo <= 0.0 || n.scale_hi < n.scale_lo) throw ConfigError("noise spec: scale_range must satisfy 0 < lo <= hi");
  return n;
}

std::vector<std::string> list_ids(const std::string& dir, std::string_view extension) {
  std::vector<std::string> ids;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == extension) ids.push_back(entry.path().stem().string());
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write " + path);
  os.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!os) throw std::runtime_error("write failed: " + path);
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Monocular 3D detection geometry: synthetic scenes, target encoding, decoding, evaluation.\n"
               "Exit codes: 0 success, 1 runtime failure (I/O, malformed data), 2 usage or config error."};
  app.require_subcommand(1);
  Flags f;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", f.config, "JSON run config; flags override its keys")->check(CLI::ExistingFile);
    sub->add_option("--seed", f.seed, "Base seed");
    sub->add_option("--jobs", f.jobs, "Worker threads; outputs do not depend on it");
    sub->add_option("--image-w", f.image_w, "Image width in pixels (default 1280)");
    sub->add_option("--image-h", f.image_h, "Image height in pixels (default 384)");
  };
  auto classes_opt = [&](CLI::App* sub) {
    sub->add_option("--classes", f.classes, "Class list (default Car Pedestrian Cyclist)")->delimiter(',');
  };

  auto* synth = app.add_subcommand("synth", "Generate seeded synthetic scenes (label_2/ and calib/)");
  common(synth);
  synth->add_option("--spec", f.spec, "Scene spec JSON");
  synth->add_option("--out", f.out, "Output directory");
  synth->add_option("--scenes", f.scenes, "Number of scenes (default 1)");
  synth->add_option("--stride", f.stride, "Feature stride used for object separation (default 4)");

  auto* encode = app.add_subcommand("encode", "Encode KITTI labels into head-output targets");
  common(encode);
  classes_opt(encode);
  encode->add_option("--labels", f.labels, "Label directory");
  encode->add_option("--calib", f.calib, "Calibration directory");
  encode->add_option("--out", f.out, "Output directory for head outputs");
  encode->add_option("--noise", f.noise, "Noise spec JSON; perturbs the encoded targets");
  encode->add_option("--stride", f.stride, "Feature stride S (default 4)");
  encode->add_option("--format", f.format, "bin (binary + JSON sidecar) or json")->check(CLI::IsMember({"bin", "json"}));

  auto* decode = app.add_subcommand("decode", "Decode head outputs into KITTI predictions");
  common(decode);
  decode->add_option("--heads", f.heads, "Head-output directory");
  decode->add_option("--calib", f.calib, "Calibration directory");
  decode->add_option("--out", f.out, "Prediction directory");
  decode->add_option("--labels", f.labels, "Ground-truth labels (oracle ensemble only)");
  decode->add_option("--ensemble", f.ensemble, "soft, hard, oracle or single:<direct|center|diag1|diag2>");
  decode->add_option("--score-threshold", f.score_threshold, "Minimum peak score (default 0.1)");
  decode->add_option("--max-detections", f.max_det, "Peaks kept per image (default 50)");

  auto* eval = app.add_subcommand("eval", "Compute AP3D of predictions against ground truth");
  common(eval);
  classes_opt(eval);
  eval->add_option("--labels", f.labels, "Ground-truth label directory");
  eval->add_option("--pred", f.pred, "Prediction directory (missing files count as empty)");
  eval->add_option("--out", f.out, "Directory for report.txt and report.json");
  eval->add_option("--mode", f.mode, "Headline metric R11 or R40")->check(CLI::IsMember({"R11", "R40"}));

  auto* report = app.add_subcommand("ensemble-report", "Per-estimator depth error and AP table");
  common(report);
  classes_opt(report);
  report->add_option("--labels", f.labels, "Ground-truth label directory");
  report->add_option("--calib", f.calib, "Calibration directory");
  report->add_option("--heads", f.heads, "Head-output directory");
  report->add_option("--out", f.out, "Directory for ensemble_report.txt and .json");
  report->add_option("--mode", f.mode, "Metric R11 or R40")->check(CLI::IsMember({"R11", "R40"}));
  report->add_option("--score-threshold", f.score_threshold, "Minimum peak score (default 0.1)");
  report->add_option("--max-detections", f.max_det, "Peaks kept per image (default 50)");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << "run with --help for usage\n";
    return kExitUsage;
  }

  try {
    const RunConfig rc = resolve(f);
    if (synth->parsed()) return cmd_synth(rc, out);
    if (encode->parsed()) return cmd_encode(rc, out);
    if (decode->parsed()) return cmd_decode(rc, out);
    if (eval->parsed()) return cmd_eval(rc, out);
    return cmd_ensemble_report(rc, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace monoflex::tools
