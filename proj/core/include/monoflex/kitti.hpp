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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "monoflex/box2d.hpp"
#include "monoflex/box3d.hpp"
#include "monoflex/camera.hpp"

namespace monoflex {

/// One row of a KITTI label_2 file:
///
///   type trunc occ alpha u1 v1 u2 v2 h w l x y z ry [score]
///
/// 15 fields for ground truth, 16 for detections. (x, y, z) is the
/// bottom-face center in the rectified camera frame.
struct ObjectLabel {
  std::string class_name;
  double truncation = 0.0;
  int occlusion = 0;
  double alpha = 0.0;
  Box2D bbox;
  double h = 0.0;
  double w = 0.0;
  double l = 0.0;
  Point3 location;
  double ry = 0.0;
  std::optional<double> score;

  bool is_dont_care() const { return class_name == "DontCare"; }
  Box3D box3d() const { return {location, h, w, l, ry}; }
};

// Parses a whole label file. Blank lines are skipped. Throws ParseError
// naming the 1-based line on a wrong field count or a non-numeric field.
std::vector<ObjectLabel> parse_label_file(std::string_view text);

// One line per label, all reals in fixed "%.2f" except the score ("%.4f").
std::string serialize_labels(std::span<const ObjectLabel> labels);

// Reads the "P2:" row (12 reals, row-major 3x4). Calibration files carry
// no image size, so it is taken from the arguments. Throws ParseError when
// P2 is missing or malformed.
CameraIntrinsics parse_calib(std::string_view text, int image_w = 1280, int image_h = 384);

// A KITTI-style calib file with P0..P3 set to the camera matrix, identity
// R0_rect and zero velodyne/imu transforms.
std::string serialize_calib(const CameraIntrinsics& K);

enum class Difficulty { Easy = 0, Moderate = 1, Hard = 2, Ignored = 3 };

std::string_view to_string(Difficulty d);

struct DifficultyThresholds {
  std::array<double, 3> min_height{40.0, 25.0, 25.0};
  std::array<int, 3> max_occlusion{0, 1, 2};
  std::array<double, 3> max_truncation{0.15, 0.30, 0.50};
};

// Whether a label meets the requirements of `level` (Easy, Moderate or Hard).
bool meets_difficulty(const ObjectLabel& label, Difficulty level, const DifficultyThresholds& t = {});

// The strictest level the label meets, Ignored if none.
Difficulty difficulty(const ObjectLabel& label, const DifficultyThresholds& t = {});

}  // namespace monoflex
