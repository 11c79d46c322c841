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
#include <span>
#include <string_view>

#include "monoflex/box3d.hpp"

namespace monoflex {

// Estimator order doubles as the hard-ensemble tie-break order.
enum class DepthSource { Direct = 0, Center = 1, Diag1 = 2, Diag2 = 3 };

inline constexpr int kNumDepthSources = 4;

std::string_view to_string(DepthSource s);
// Accepts "direct", "center", "diag1", "diag2". Throws PreconditionError.
DepthSource depth_source_from_string(std::string_view name);

struct DepthEstimate {
  double z = 0.0;
  double sigma = 1.0;
  bool valid = true;
  DepthSource source = DepthSource::Direct;
};

// z_r = 1 / sigmoid(raw) - 1, i.e. exp(-raw). Saturates instead of overflowing.
double direct_depth(double raw);
// Inverse of direct_depth: -ln z. Throws DomainError for z <= 0.
double direct_depth_inverse(double z);

// Depth of a vertical supporting line from its pixel height and metric height:
// z = f * H / h_l. Throws DomainError unless all three are positive.
double line_depth(double pixel_height, double object_height, double focal);

/// The three keypoint-group depths in the order {Center, Diag1, Diag2}.
///
/// Center uses the line from the top center to the bottom center. Diag1
/// averages the depths of vertical edges (0,4) and (2,6); Diag2 those of
/// (1,5) and (3,7) (0-based corner indices, see corners()). A group is valid
/// only if every keypoint it uses is inside the image. An edge with
/// non-positive pixel height invalidates its group; the group then keeps the
/// depth of its other edge, or NaN when none is usable. sigma is left at 1.
std::array<DepthEstimate, 3> keypoint_depths(const Keypoints10& kps, double object_height, double focal);

// Weighted by 1/sigma. Invalid estimates are skipped while at least one
// valid one exists; with none valid only the Direct estimate is used (or
// all of them when there is no Direct entry). Non-finite z are always
// skipped. Throws PreconditionError for an empty input, DomainError for
// sigma <= 0.
double soft_ensemble(std::span<const DepthEstimate> estimates);

// Depth of the smallest-sigma estimate among the same participants as
// soft_ensemble; ties go to the earlier DepthSource.
double hard_ensemble(std::span<const DepthEstimate> estimates);
// Index into `estimates` of the hard-ensemble choice.
std::size_t hard_ensemble_index(std::span<const DepthEstimate> estimates);

// Finite estimate nearest to z_true (validity ignored); ties go to the
// lower index.
double oracle_select(std::span<const DepthEstimate> estimates, double z_true);

}  // namespace monoflex
