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

#include "monoflex/feature_map.hpp"

namespace monoflex {

// Channel offsets of the dense prediction maps, in storage order:
//
//   heatmap        num_classes
//   offset         2   (du, dv) cells
//   box2d          4   (left, top, right, bottom) pixels from the representative point
//   dims           3   log(k / mean_k) for (h, w, l)
//   orient_logits  num_bins
//   orient_res     2 * num_bins  (sin, cos) per bin
//   keypoints      20  (du, dv) cells from the representative point, k1..k10
//   depth          1   raw direct-depth output z_o
//   depth_logsigma 1
//   kp_logsigma    3   center, diag1, diag2
struct HeadLayout {
  int num_classes = 0;
  int num_bins = 4;

  int heatmap() const { return 0; }
  int offset() const { return num_classes; }
  int box2d() const { return offset() + 2; }
  int dims() const { return box2d() + 4; }
  int orient_logits() const { return dims() + 3; }
  int orient_res() const { return orient_logits() + num_bins; }
  int keypoints() const { return orient_res() + 2 * num_bins; }
  int depth() const { return keypoints() + 20; }
  int depth_logsigma() const { return depth() + 1; }
  int kp_logsigma() const { return depth_logsigma() + 1; }
  int total() const { return kp_logsigma() + 3; }

  std::vector<std::string> channel_names(const std::vector<std::string>& class_names) const;
};

struct HeadOutputs {
  std::vector<std::string> class_names;
  int stride = 4;
  int num_bins = 4;
  FeatureMap maps;  // rows x cols x layout().total()

  HeadOutputs() = default;
  HeadOutputs(std::vector<std::string> classes, int rows, int cols, int stride, int num_bins = 4);

  HeadLayout layout() const { return {static_cast<int>(class_names.size()), num_bins}; }
  int rows() const { return maps.h(); }
  int cols() const { return maps.w(); }
  // Index of a class name, -1 if absent.
  int class_index(std::string_view name) const;
};

/// On-disk form: a flat little-endian float32 array in channel-major (CHW)
/// order, plus a JSON sidecar describing it:
///
///   {"format": "monoflex-head-outputs", "version": 1, "dtype": "float32le",
///    "layout": "CHW", "channels": C, "Hf": rows, "Wf": cols, "S": stride,
///    "num_bins": N, "class_names": [...], "channel_names": [...]}
///
/// Element (ch, r, c) sits at byte offset 4 * ((ch * Hf + r) * Wf + c).
std::string head_header_json(const HeadOutputs& ho);
std::string head_to_binary(const HeadOutputs& ho);
// Throws ParseError on a malformed header or a payload of the wrong size.
HeadOutputs head_from_binary(std::string_view header_json, std::string_view payload);

// Single-document JSON alternative for small fixtures: the sidecar fields
// plus "data", the CHW values as a flat array of numbers.
std::string head_to_json(const HeadOutputs& ho);
HeadOutputs head_from_json(std::string_view text);

}  // namespace monoflex
