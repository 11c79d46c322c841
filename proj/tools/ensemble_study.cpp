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

#include "ensemble_study.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include <json.hpp>

#include "parallel.hpp"

namespace monoflex::tools {

namespace {

const std::vector<std::string> kRowNames = {"direct", "center", "diag1", "diag2", "hard", "soft", "oracle"};

double row_depth(const Detection& det, std::size_t row, const ObjectLabel* gt) {
  const auto usable = [](double z) { return std::isfinite(z) && z > 0.0; };
  if (row < 4) {
    const double z = det.depths[row].z;
    return usable(z) ? z : det.depths[0].z;
  }
  if (row == 4) return hard_ensemble(det.depths);
  if (row == 5 || gt == nullptr) return det.z_soft;
  return oracle_select(det.depths, gt->location.z);
}

struct ImageOutcome {
  std::vector<std::vector<ObjectLabel>> det_per_row;
  std::vector<double> abs_err_sum;
  int matched = 0;
};

}  // namespace

std::vector<int> match_2d(const std::vector<ObjectLabel>& gt, const std::vector<Detection>& dets) {
  std::vector<int> out(dets.size(), -1);
  std::vector<bool> taken(gt.size(), false);
  // Detections arrive sorted by descending score.
  for (std::size_t d = 0; d < dets.size(); ++d) {
    double best = 0.5;
    int best_g = -1;
    for (std::size_t g = 0; g < gt.size(); ++g) {
      if (taken[g] || gt[g].class_name != dets[d].class_name) continue;
      const double iou = iou2d(dets[d].box2d, gt[g].bbox);
      if (iou > best) {
        best = iou;
        best_g = static_cast<int>(g);
      }
    }
    if (best_g >= 0) {
      taken[static_cast<std::size_t>(best_g)] = true;
      out[d] = best_g;
    }
  }
  return out;
}

double strategy_depth(const Detection& det, std::string_view strategy, const ObjectLabel* gt) {
  for (std::size_t r = 0; r < kRowNames.size(); ++r) {
    if (kRowNames[r] == strategy) return row_depth(det, r, gt);
  }
  throw std::invalid_argument("unknown depth strategy '" + std::string(strategy) + "'");
}

const StudyRow& StudyResult::row(const std::string& name) const {
  for (const auto& r : rows) {
    if (r.name == name) return r;
  }
  throw std::out_of_range("no study row '" + name + "'");
}

std::vector<Detection> study_decode(const HeadOutputs& heads, const CameraIntrinsics& K, const DecodeConfig& cfg) {
  DecodeConfig soft = cfg;
  soft.ensemble = EnsembleMode::Soft;
  return decode_detections(heads, K, soft).detections;
}

StudyResult run_ensemble_study(const std::vector<StudyImage>& images, const DecodeConfig& cfg,
                               const EvalConfig& eval_cfg, int jobs) {
  const std::size_t n_rows = kRowNames.size();

  std::vector<ImageOutcome> outcomes(images.size());
  parallel_for(images.size(), jobs, [&](std::size_t i) {
    const StudyImage& img = images[i];
    const auto& dets = img.detections;
    const auto match = match_2d(img.gt, dets);
    ImageOutcome& o = outcomes[i];
    o.det_per_row.assign(n_rows, {});
    o.abs_err_sum.assign(n_rows, 0.0);
    for (std::size_t d = 0; d < dets.size(); ++d) {
      const ObjectLabel* gt = match[d] >= 0 ? &img.gt[static_cast<std::size_t>(match[d])] : nullptr;
      if (gt) ++o.matched;
      for (std::size_t r = 0; r < n_rows; ++r) {
        const double z = row_depth(dets[d], r, gt);
        Detection placed = dets[d];
        placed.z = z;
        placed.box3d = box_at_depth(dets[d], z, img.calib, cfg.center);
        o.det_per_row[r].push_back(to_label(placed));
        if (gt) o.abs_err_sum[r] += std::abs(placed.box3d.location.z - gt->location.z);
      }
    }
  });

  std::vector<std::vector<ObjectLabel>> gt_all;
  gt_all.reserve(images.size());
  for (const auto& img : images) gt_all.push_back(img.gt);

  StudyResult study;
  int matched = 0;
  for (const auto& o : outcomes) matched += o.matched;
  for (std::size_t r = 0; r < n_rows; ++r) {
    StudyRow row;
    row.name = kRowNames[r];
    row.matched = matched;
    double err = 0.0;
    std::vector<std::vector<ObjectLabel>> det_all;
    det_all.reserve(images.size());
    for (const auto& o : outcomes) {
      err += o.abs_err_sum[r];
      det_all.push_back(o.det_per_row[r]);
    }
    row.mean_abs_depth_error = matched > 0 ? err / matched : 0.0;
    row.eval = evaluate(gt_all, det_all, eval_cfg);
    study.rows.push_back(std::move(row));
  }
  return study;
}

std::string format_study_text(const StudyResult& study, const EvalConfig& eval_cfg) {
  std::string out;
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%-8s %10s", "depth", "|dz| [m]");
  out += buf;
  for (const auto& cls : eval_cfg.classes) {
    for (Difficulty d : eval_cfg.difficulties) {
      const std::string head = cls.substr(0, 3) + "/" + std::string(to_string(d)).substr(0, 3);
      std::snprintf(buf, sizeof(buf), " %8s", head.c_str());
      out += buf;
    }
  }
  out += "\n";
  for (const auto& row : study.rows) {
    std::snprintf(buf, sizeof(buf), "%-8s %10.4f", row.name.c_str(), row.mean_abs_depth_error);
    out += buf;
    for (const auto& cls : eval_cfg.classes) {
      for (Difficulty d : eval_cfg.difficulties) {
        const LevelResult& l = row.eval.at(cls, d);
        const double ap = eval_cfg.mode == ApMode::R40 ? l.ap_r40 : l.ap_r11;
        if (l.populated) {
          std::snprintf(buf, sizeof(buf), " %8.4f", ap);
        } else {
          std::snprintf(buf, sizeof(buf), " %8s", "-");
        }
        out += buf;
      }
    }
    out += "\n";
  }
  return out;
}

std::string format_study_json(const StudyResult& study, const EvalConfig& eval_cfg) {
  nlohmann::ordered_json doc;
  doc["metric"] = eval_cfg.mode == ApMode::R40 ? "AP3D_R40" : "AP3D_R11";
  auto& rows = doc["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : study.rows) {
    nlohmann::ordered_json jr;
    jr["depth"] = row.name;
    jr["mean_abs_depth_error"] = row.mean_abs_depth_error;
    jr["matched"] = row.matched;
    auto& ap = jr["ap"] = nlohmann::ordered_json::object();
    for (const auto& cls : eval_cfg.classes) {
      for (Difficulty d : eval_cfg.difficulties) {
        const LevelResult& l = row.eval.at(cls, d);
        const double v = eval_cfg.mode == ApMode::R40 ? l.ap_r40 : l.ap_r11;
        ap[cls][std::string(to_string(d))] = l.populated ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
      }
    }
    rows.push_back(std::move(jr));
  }
  return doc.dump(2) + "\n";
}

}  // namespace monoflex::tools
