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

#include <array>
#include <map>
#include <string>
#include <vector>

#include "monoflex/box2d.hpp"
#include "monoflex/box3d.hpp"
#include "monoflex/kitti.hpp"

namespace monoflex {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

using Polygon = std::vector<Vec2>;

// Shoelace area; positive for counterclockwise vertex order.
double signed_area(const Polygon& poly);

// Sutherland-Hodgman clipping of `subject` against the convex,
// counterclockwise polygon `clip`. Returns an empty polygon when the
// intersection has area below 1e-12.
Polygon convex_clip(const Polygon& subject, const Polygon& clip);

// Counterclockwise footprint of the box in the (x, z) ground plane.
Polygon bev_polygon(const Box3D& b);

double iou_bev(const Box3D& a, const Box3D& b);
double iou3d(const Box3D& a, const Box3D& b);
double iou2d(const Box2D& a, const Box2D& b);

enum class ApMode { R11, R40 };

struct EvalConfig {
  std::map<std::string, double> iou_threshold{{"Car", 0.7}, {"Pedestrian", 0.5}, {"Cyclist", 0.5}};
  std::vector<std::string> classes{"Car", "Pedestrian", "Cyclist"};
  std::vector<Difficulty> difficulties{Difficulty::Easy, Difficulty::Moderate, Difficulty::Hard};
  ApMode mode = ApMode::R40;  // headline metric in reports
  DifficultyThresholds thresholds;
  double dont_care_iou = 0.5;
};

struct PRPoint {
  double score = 0.0;
  double recall = 0.0;
  double precision = 0.0;
};

using PRCurve = std::vector<PRPoint>;

struct LevelResult {
  Difficulty difficulty = Difficulty::Moderate;
  int num_gt = 0;  // ground truth counted at this level
  int num_tp = 0;
  int num_fp = 0;
  bool populated = false;  // num_gt > 0; AP values are 0 otherwise
  double ap_r11 = 0.0;
  double ap_r40 = 0.0;
  PRCurve curve;
};

struct ClassResult {
  std::string class_name;
  std::vector<LevelResult> levels;
};

struct EvalResult {
  std::vector<ClassResult> classes;

  // Throws PreconditionError when the class/level was not evaluated.
  const LevelResult& at(const std::string& cls, Difficulty d) const;
};

// Outcome of matching the detections of one image.
struct MatchedDetection {
  double score = 0.0;
  bool true_positive = false;
};

/// Greedy matching for one image, one class, one difficulty level.
///
/// Detections are visited by descending score; each takes the unmatched
/// counted ground truth of highest 3D IoU at or above `iou_threshold`. A
/// detection that instead overlaps ground truth excluded at this level, or a
/// DontCare region (2D IoU above cfg.dont_care_iou), is dropped: neither TP
/// nor FP.
std::vector<MatchedDetection> match_image(const std::vector<ObjectLabel>& gt, const std::vector<ObjectLabel>& det,
                                          const std::string& cls, Difficulty level, double iou_threshold,
                                          const EvalConfig& cfg, int* num_counted_gt);

// AP by interpolated precision at recall points {0, .1, ..., 1} (R11) or
// {1/40, ..., 1} (R40).
double average_precision(const PRCurve& curve, ApMode mode);

// Builds the PR curve from pooled matches; recall is relative to num_gt.
PRCurve pr_curve(std::vector<MatchedDetection> matches, int num_gt);

// gt[i] and det[i] belong to the same image. Throws PreconditionError for
// a configured class without an IoU threshold or mismatched image counts.
EvalResult evaluate(const std::vector<std::vector<ObjectLabel>>& gt, const std::vector<std::vector<ObjectLabel>>& det,
                    const EvalConfig& cfg = {});

std::string format_report_text(const EvalResult& result);
// JSON document; include_curves adds the full PR curve of every level.
std::string format_report_json(const EvalResult& result, bool include_curves = true);

}  // namespace monoflex
