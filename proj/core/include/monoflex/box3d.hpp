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

#include "monoflex/camera.hpp"

namespace monoflex {

// A yaw-only 3D box in the camera frame. `location` is the bottom-face
// center (KITTI convention), so the box spans y in [location.y - h, location.y].
struct Box3D {
  Point3 location;
  double h = 1.0;
  double w = 1.0;
  double l = 1.0;
  double ry = 0.0;

  // Volumetric center: location + (0, -h/2, 0).
  Point3 center() const { return {location.x, location.y - 0.5 * h, location.z}; }
};

inline constexpr int kNumCorners = 8;
inline constexpr int kNumKeypoints = 10;
inline constexpr int kBottomCenter = 8;  // k9 in 1-based numbering
inline constexpr int kTopCenter = 9;     // k10

/// The 8 box vertices.
///
/// Bottom corners 0..3 run counterclockwise viewed from above, starting at
/// (+l/2, +w/2) in the box frame (x along the length, z along the width);
/// top corners 4..7 sit directly above them at y = -h. Vertical edge i joins
/// corner i and corner i + 4. The box frame is rotated by ry about the
/// camera y axis and then translated to `location`.
std::array<Point3, kNumCorners> corners(const Box3D& b);

struct Keypoints10 {
  std::array<Point2, kNumKeypoints> pts{};
  std::array<bool, kNumKeypoints> inside{};
};

// Projections of the 8 corners, the bottom center and the top center, plus
// per-point in-image flags over [0, W) x [0, H). Throws DomainError if any
// corner is at or behind the camera plane.
Keypoints10 keypoints10(const Box3D& b, const CameraIntrinsics& K);

// Sum over the 8 corners of the L1 distance between corresponding vertices.
double corner_loss(const Box3D& pred, const Box3D& gt);

}  // namespace monoflex
