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
#include <span>
#include <string>
#include <vector>

#include "monoflex/box2d.hpp"
#include "monoflex/depthsolve.hpp"
#include "monoflex/feature_map.hpp"
#include "monoflex/represent.hpp"

namespace monoflex {

struct Dims {
  double h = 1.0;
  double w = 1.0;
  double l = 1.0;
};

// KITTI training-split class averages (meters).
std::map<std::string, Dims> default_class_mean_dims();

struct LossConfig {
  double focal_alpha = 2.0;
  double focal_beta = 4.0;
  std::vector<double> bin_centers{0.0, kPi / 2.0, kPi, -kPi / 2.0};
  // Half-width of a bin beyond pi / N: a bin covers |alpha - center| <= pi/N + margin.
  double bin_overlap_margin = 0.1;
  std::map<std::string, Dims> class_mean_dims = default_class_mean_dims();

  int num_bins() const { return static_cast<int>(bin_centers.size()); }
  // Throws PreconditionError for an unknown class.
  const Dims& mean_dims(const std::string& cls) const;
};

// Penalty-reduced focal loss over all cells and channels. pred must lie in
// (0, 1); a cell is positive where gt == 1. Normalised by the number of
// positives (at least 1).
double focal_heatmap_loss(const FeatureMap& pred, const FeatureMap& gt, const LossConfig& cfg = {});

// Per-coordinate offset loss averaged over the coordinates: |d| for inside
// objects, log(1 + |d|) for outside ones.
double offset_loss(std::span<const double> pred, std::span<const double> gt, RepresentKind kind);

struct OffsetSample {
  std::array<double, 2> pred{};
  std::array<double, 2> gt{};
  RepresentKind kind = RepresentKind::Inside;
};

// Mean over inside objects plus mean over outside objects (an empty group
// contributes 0).
double offset_loss_total(std::span<const OffsetSample> samples);

// sum_k |mean_k * exp(delta_k) - gt_k| over (h, w, l).
double dim_loss(const std::array<double, 3>& log_deltas, const Dims& gt, const std::string& cls,
                const LossConfig& cfg = {});

struct MultiBinLoss {
  double classification = 0.0;
  double residual = 0.0;
  double total() const { return classification + residual; }
};

// Bins whose (overlapping) range contains alpha.
std::vector<int> covering_bins(double alpha, const LossConfig& cfg = {});

// Softmax cross-entropy averaged over the covering bins, plus the mean L1
// error of the (sin, cos) residual of each covering bin.
// `residual_sincos` holds N (sin, cos) pairs.
MultiBinLoss multibin_loss(std::span<const double> bin_logits, std::span<const double> residual_sincos,
                           double gt_alpha, const LossConfig& cfg = {});

// alpha = wrap(center[argmax] + atan2(sin, cos)) of the argmax bin.
double decode_orientation(std::span<const double> bin_logits, std::span<const double> residual_sincos,
                          const LossConfig& cfg = {});

// Ground-truth logits (1 for the nearest bin, 0 elsewhere) and per-bin residuals.
void encode_orientation(double alpha, std::span<double> bin_logits, std::span<double> residual_sincos,
                        const LossConfig& cfg = {});

struct KeypointLoss {
  double value = 0.0;
  bool has_inside = false;  // false when the mask is empty; value is then 0
};

// Masked mean of per-keypoint L1 errors; offsets are 10 (du, dv) pairs.
KeypointLoss keypoint_loss(std::span<const double> pred_offsets, std::span<const double> gt_offsets,
                           std::span<const bool> inside);

// |z - z*| / sigma + log sigma. Throws DomainError for sigma <= 0.
double depth_unc_loss(double z_pred, double z_gt, double sigma);

// Sum over the three keypoint groups; the log-sigma term is kept only for
// valid groups.
double keypoint_depth_loss(std::span<const DepthEstimate> estimates, double z_gt);

// 1 - GIoU. Throws PreconditionError for a degenerate box.
double giou_loss(const Box2D& a, const Box2D& b);

// Unit-weight sum of the individual terms a caller chooses to fill in.
struct LossTerms {
  double heatmap = 0.0;
  double offset = 0.0;
  double box2d = 0.0;
  double dims = 0.0;
  double orientation = 0.0;
  double keypoints = 0.0;
  double depth = 0.0;
  double keypoint_depth = 0.0;
  double corner = 0.0;

  double total() const {
    return heatmap + offset + box2d + dims + orientation + keypoints + depth + keypoint_depth + corner;
  }
};

}  // namespace monoflex
