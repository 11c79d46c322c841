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
#include <cstdint>
#include <string>
#include <vector>

#include "monoflex/decode.hpp"
#include "monoflex/head_outputs.hpp"
#include "monoflex/kitti.hpp"

namespace monoflex {

// Small counter-based generator. Output depends only on the seed, never on
// the standard library's distribution implementations.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();
  double uniform();                      // [0, 1)
  double uniform(double lo, double hi);  // [lo, hi)
  double normal();                       // N(0, 1), Box-Muller
  std::size_t index(std::size_t n);      // [0, n)

 private:
  std::uint64_t state_;
};

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

struct ClassShare {
  std::string name;
  double weight = 1.0;
};

struct SceneSpec {
  std::uint64_t seed = 0;
  int n_objects = 8;
  std::vector<ClassShare> class_mix{{"Car", 0.6}, {"Pedestrian", 0.2}, {"Cyclist", 0.2}};
  std::array<double, 2> depth_range{8.0, 45.0};      // location z, meters
  std::array<double, 2> height_range{1.45, 1.75};    // bottom-center y (camera height), meters
  double dim_jitter = 0.1;                           // relative spread around the class mean
  double truncation_fraction = 0.3;                  // share of objects with xc outside the image
  CameraIntrinsics camera;
  int stride = 4;
  int attempt_budget = 10000;  // per object
  DecodeConfig decode;         // class means and center convention for the generated labels

  // Throws PreconditionError on an invalid spec.
  void validate() const;
};

struct Scene {
  std::vector<ObjectLabel> labels;
  CameraIntrinsics calib;
};

/// Random scene that survives a KITTI text round trip unchanged: every
/// label value is quantized to the 0.01 file precision before the scene is
/// checked. Exactly round(n * truncation_fraction) objects have their
/// projected center outside the image. Every corner has z > 1 m and no two
/// objects share a grid cell or sit in neighbouring cells of the same
/// region (interior or ring), so each object keeps its own heatmap peak.
/// Throws PreconditionError when an object cannot be placed within the
/// attempt budget.
Scene gen_scene(const SceneSpec& spec);

/// Additive Gaussian noise on the regression channels of one image's head
/// maps. Keypoint noise is set per depth group (center keypoints; corners
/// of diag1; corners of diag2). Each cell draws an independent log-uniform
/// multiplier in [scale_lo, scale_hi] per depth estimator, so the best
/// estimator varies from object to object.
struct NoiseSpec {
  std::uint64_t seed = 0;
  double offset_std = 0.0;                 // cells
  double box2d_std = 0.0;                  // pixels
  double dim_std = 0.0;                    // log scale
  double orient_std = 0.0;                 // on (sin, cos) residuals
  std::array<double, 3> keypoint_std{};    // cells, {center, diag1, diag2}
  double depth_std = 0.0;                  // on the raw direct-depth output
  double scale_lo = 1.0;
  double scale_hi = 1.0;
  // Rewrite the uncertainty channels with the first-order depth spread the
  // injected noise causes.
  bool honest_sigma = true;
  // Only cells whose strongest heatmap value reaches this are perturbed.
  double min_heat = 0.1;
};

HeadOutputs perturb(const HeadOutputs& ho, const NoiseSpec& noise, const CameraIntrinsics& K,
                    const DecodeConfig& cfg = {});

}  // namespace monoflex
