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
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "monoflex/depthsolve.hpp"
#include "monoflex/head_outputs.hpp"
#include "monoflex/kitti.hpp"
#include "monoflex/losses.hpp"
#include "monoflex/represent.hpp"

namespace monoflex {

enum class EnsembleMode { Soft, Hard, Single };

struct DecodeConfig {
  RepresentConfig represent;
  LossConfig loss;
  std::vector<std::string> class_names{"Car", "Pedestrian", "Cyclist"};
  CenterConvention center = CenterConvention::Volumetric;
  int max_detections = 50;
  double score_threshold = 0.1;
  EnsembleMode ensemble = EnsembleMode::Soft;
  DepthSource single_source = DepthSource::Direct;  // used by EnsembleMode::Single
  double sigma_floor = 0.01;                        // sigma written into ground-truth targets
};

struct EncodeResult {
  HeadOutputs heads;
  std::vector<Representation> representations;  // one per encoded object
  int encoded = 0;
  int skipped_behind_camera = 0;  // center or a corner at z <= 0
  int skipped_other = 0;          // unlisted class, DontCare, unusable 2D box
  int collisions = 0;             // object landed on an already occupied cell
};

/// Ground-truth head maps for one image.
///
/// Inside objects get a 2D Gaussian on interior cells; outside objects a 1D
/// Gaussian along the boundary ring. At the object's cell the regression
/// channels hold the exact center offset, FCOS distances, log-dimension
/// offsets, orientation bins/residuals of alpha, keypoint offsets from the
/// representative point, raw depth -ln z, and log(sigma_floor) in every
/// uncertainty channel. On a cell collision the first object is kept.
EncodeResult encode_targets(std::span<const ObjectLabel> labels, const CameraIntrinsics& K, const DecodeConfig& cfg = {});

struct Peak {
  Cell cell;
  int class_index = 0;
  double score = 0.0;
  bool on_ring = false;
};

enum class GridRegion { Interior, Ring };

// Optional instrumentation: called for every cell the decoder reads, with
// the region of the peak search or the peak being decoded.
using CellReadHook = std::function<void(GridRegion, Cell)>;

/// Local maxima of channels [0, num_classes) at or above `threshold`.
///
/// Interior cells compete only with their interior 8-neighbours; ring cells
/// only with their two neighbours along RingPath. On equal values the cell
/// with the smaller (row, col) wins. Results are ordered by descending score,
/// then class, row, col, and truncated to k.
std::vector<Peak> topk_peaks(const FeatureMap& heatmap, int num_classes, int k, double threshold,
                             const CellReadHook& hook = {});

struct Detection {
  std::string class_name;
  double score = 0.0;
  Box2D box2d;
  Box3D box3d;
  double alpha = 0.0;
  Point2 xc;
  Point2 xr;
  RepresentKind kind = RepresentKind::Inside;
  Cell cell;
  std::array<DepthEstimate, kNumDepthSources> depths{};  // Direct, Center, Diag1, Diag2
  double z_soft = 0.0;
  double z = 0.0;  // depth actually used for box3d
};

struct DecodeResult {
  std::vector<Detection> detections;
  int dropped_nonfinite = 0;
};

/// Peaks to 3D boxes. Interior peaks decode as inside objects (xr = xc);
/// ring peaks as outside objects, whose border point xr is recovered from
/// xc and the 2D-box distances. Depth comes from the configured ensemble of
/// the direct estimate and the three keypoint groups; xc is back-projected
/// at that depth and alpha converted to ry at the recovered location.
DecodeResult decode_detections(const HeadOutputs& ho, const CameraIntrinsics& K, const DecodeConfig& cfg = {},
                               const CellReadHook& hook = {});

// Recomputes location and ry of a detection for another depth.
Box3D box_at_depth(const Detection& det, double z, const CameraIntrinsics& K,
                   CenterConvention convention = CenterConvention::Volumetric);

// KITTI prediction row (truncation and occlusion -1).
ObjectLabel to_label(const Detection& det);

}  // namespace monoflex
