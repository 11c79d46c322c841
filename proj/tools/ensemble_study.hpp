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

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "monoflex/decode.hpp"
#include "monoflex/eval3d.hpp"
#include "monoflex/kitti.hpp"

namespace monoflex::tools {

struct StudyImage {
  std::vector<ObjectLabel> gt;
  std::vector<Detection> detections;  // from study_decode
  CameraIntrinsics calib;
};

// Soft-ensemble decode keeping every per-estimator depth.
std::vector<Detection> study_decode(const HeadOutputs& heads, const CameraIntrinsics& K, const DecodeConfig& cfg);

// Greedy 2D matching by descending score: for each detection, the index of
// the same-class ground truth it pairs with at 2D IoU > 0.5, or -1.
std::vector<int> match_2d(const std::vector<ObjectLabel>& gt, const std::vector<Detection>& dets);

// Depth a strategy assigns to a decoded detection. `gt` may be null; the
// oracle then falls back to the soft ensemble.
double strategy_depth(const Detection& det, std::string_view strategy, const ObjectLabel* gt);

// One row per depth strategy: the four single estimators, hard and soft
// ensembles, and the ground-truth oracle.
struct StudyRow {
  std::string name;
  double mean_abs_depth_error = 0.0;  // over detections matched with 2D IoU > 0.5
  int matched = 0;
  EvalResult eval;
};

struct StudyResult {
  std::vector<StudyRow> rows;

  const StudyRow& row(const std::string& name) const;
};

// Re-places each detection at the depth each
// strategy picks. The oracle takes the estimate closest to the matched
// ground truth (soft ensemble for unmatched detections).
StudyResult run_ensemble_study(const std::vector<StudyImage>& images, const DecodeConfig& decode_cfg,
                               const EvalConfig& eval_cfg, int jobs = 1);

std::string format_study_text(const StudyResult& study, const EvalConfig& eval_cfg);
std::string format_study_json(const StudyResult& study, const EvalConfig& eval_cfg);

}  // namespace monoflex::tools
